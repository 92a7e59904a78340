#pragma once

// Candidate answer extraction and scoring: term coverage, proximity, n-gram
// coverage, semantic similarity and pattern matching, combined by a weighted
// sum per question type.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmforge/corpus.hpp"
#include "cmforge/error.hpp"
#include "cmforge/retrieval.hpp"

namespace cmforge::qa {

// ---------------------------------------------------------------------------
// Sentence segmentation

inline const std::set<std::string>& default_abbreviations()
{
    static const std::set<std::string> abbrev = {"mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "etc",
                                                 "e.g", "i.e", "no", "inc", "ltd", "co", "mt", "ft", "km", "sq",
                                                 "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept",
                                                 "oct", "nov", "dec", "u.s", "u.k"};
    return abbrev;
}

/// Abbreviations that precede a name and so never end a sentence.
inline const std::set<std::string>& default_titles()
{
    static const std::set<std::string> titles = {"mr", "mrs", "ms", "dr", "prof", "smt", "shri"};
    return titles;
}

/// Splits tokens into sentences after ". ! ? ।". A period does not end the
/// sentence when it follows a title, a single uppercase letter (an initial),
/// or a known abbreviation with a lowercase word or a digit next.
inline std::vector<std::vector<Token>> segment_tokens(const std::vector<Token>& tokens,
                                                      const std::set<std::string>& abbrev = default_abbreviations())
{
    const auto& titles = default_titles();
    std::vector<std::vector<Token>> out;
    std::vector<Token> cur;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        cur.push_back(tokens[i]);
        const auto& w = tokens[i].surface;
        const bool terminal = w == "!" || w == "?" || w == "\xE0\xA5\xA4" || w == "\xE0\xA5\xA5";
        bool stop = terminal;
        if (w == ".") {
            stop = true;
            if (cur.size() >= 2) {
                const auto& prev = cur[cur.size() - 2].surface;
                const auto lp = unicode::to_lower(prev);
                const bool initial = unicode::code_points(prev).size() == 1 && unicode::starts_upper(prev);
                const bool next_continues =
                    i + 1 < tokens.size() && (unicode::starts_lower(tokens[i + 1].surface) ||
                                              std::isdigit(static_cast<unsigned char>(tokens[i + 1].surface[0])));
                if (initial || titles.count(lp) || (abbrev.count(lp) && next_continues)) stop = false;
            }
        }
        if (stop) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline std::vector<std::string> split_sentences(std::string_view text, const LanguageTag& lang = LanguageTag("en"))
{
    std::vector<std::string> out;
    for (const auto& s : segment_tokens(tokenize(text, lang))) out.push_back(detokenize(surfaces(s)));
    return out;
}

// ---------------------------------------------------------------------------
// Answer types and patterns

struct AnswerTypeRule {
    std::optional<NeType> ne;
    std::optional<std::string> regex;
};

/// Maps an expected answer type to NE labels and/or regex detectors.
class AnswerTypeMap {
public:
    void add_ne(const std::string& type, NeType ne) { rules_[type].push_back({ne, std::nullopt}); }

    void add_regex(const std::string& type, const std::string& re)
    {
        try {
            std::regex test(re, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
            throw input_error("answer type " + type + ": bad regex '" + re + "': " + e.what());
        }
        rules_[type].push_back({std::nullopt, re});
    }

    const std::vector<AnswerTypeRule>& rules(const std::string& type) const
    {
        auto it = rules_.find(type);
        if (it == rules_.end()) {
            std::string known;
            for (const auto& [k, v] : rules_) known += (known.empty() ? "" : ", ") + k;
            throw input_error("unknown answer type '" + type + "' (configured: " + known + ")");
        }
        return it->second;
    }

    std::vector<std::string> types() const
    {
        std::vector<std::string> out;
        for (const auto& [k, v] : rules_) out.push_back(k);
        return out;
    }

private:
    std::map<std::string, std::vector<AnswerTypeRule>> rules_;
};

inline constexpr const char* kNumberRegex =
    "[0-9][0-9,]*(\\.[0-9]+)?( (km|kms|sq km|m|metres|meters|ft|feet|kg|percent|%|crore|lakh|million|billion|"
    "thousand|hundred|years|rupees|rs|miles))?";
inline constexpr const char* kDateRegex =
    "([0-9]{1,2} )?(january|february|march|april|may|june|july|august|september|october|november|december)"
    "( [0-9]{1,2})?( ,)?( [0-9]{3,4})?|[0-9]{3,4}|[0-9]{1,2}(st|nd|rd|th) century";

inline AnswerTypeMap default_answer_types()
{
    AnswerTypeMap m;
    m.add_ne("PERSON", NeType::PER);
    m.add_ne("LOCATION", NeType::LOC);
    m.add_ne("ORGANIZATION", NeType::ORG);
    m.add_regex("NUMBER", kNumberRegex);
    m.add_regex("DATE", kDateRegex);
    return m;
}

/// Lines "TYPE<TAB>ne<TAB>PER" or "TYPE<TAB>regex<TAB>pattern"; '#' comments.
inline AnswerTypeMap parse_answer_types(std::istream& in)
{
    AnswerTypeMap m;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (cmforge::detail::blank(line) || line[0] == '#') continue;
        auto f = cmforge::detail::split(line, '\t');
        if (f.size() != 3) throw parse_error(lineno, "expected 3 fields");
        try {
            if (f[1] == "ne")
                m.add_ne(f[0], parse_ne_type(f[2]));
            else if (f[1] == "regex")
                m.add_regex(f[0], f[2]);
            else
                throw parse_error(lineno, "kind must be 'ne' or 'regex'");
        } catch (const parse_error&) {
            throw;
        } catch (const input_error& e) {
            throw parse_error(lineno, e.what());
        }
    }
    return m;
}

inline AnswerTypeMap load_answer_types(const std::string& path)
{
    auto in = cmforge::detail::open_input(path);
    return parse_answer_types(in);
}

struct Pattern {
    std::string source;  // may contain <F>, the focus placeholder
    double weight = 0;
};

/// Lines "regex<TAB>weight"; weights in [0,1].
inline std::vector<Pattern> parse_patterns(std::istream& in)
{
    std::vector<Pattern> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (cmforge::detail::blank(line) || line[0] == '#') continue;
        auto f = cmforge::detail::split(line, '\t');
        if (f.size() != 2) throw parse_error(lineno, "expected 'regex<TAB>weight'");
        Pattern p{f[0], 0};
        try {
            std::size_t used = 0;
            p.weight = std::stod(f[1], &used);
            if (used != f[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw parse_error(lineno, "bad weight '" + f[1] + "'");
        }
        if (!(p.weight >= 0 && p.weight <= 1)) throw parse_error(lineno, "weight must be in [0,1]");
        out.push_back(std::move(p));
    }
    return out;
}

inline std::vector<Pattern> load_patterns(const std::string& path)
{
    auto in = cmforge::detail::open_input(path);
    return parse_patterns(in);
}

namespace detail {

inline std::string regex_escape(const std::string& s)
{
    static const std::string special = "\\^$.|?*+()[]{}";
    std::string out;
    for (char c : s) {
        if (special.find(c) != std::string::npos) out += '\\';
        out += c;
    }
    return out;
}

inline std::string instantiate(const std::string& pattern, const std::vector<std::string>& focus)
{
    std::string alt;
    for (const auto& f : focus) alt += (alt.empty() ? "" : "|") + regex_escape(f);
    if (alt.empty()) alt = "(?!)";
    std::string out;
    std::size_t pos = 0;
    while (true) {
        auto k = pattern.find("<F>", pos);
        if (k == std::string::npos) break;
        out += pattern.substr(pos, k - pos) + "(?:" + alt + ")";
        pos = k + 3;
    }
    return out + pattern.substr(pos);
}

}  // namespace detail

/// Largest weight among patterns matching the lowercased, space-joined
/// sentence, with <F> standing for any query term.
inline double pattern_score(const std::vector<Pattern>& patterns, const std::vector<std::string>& query_terms,
                            const std::vector<std::string>& sentence_words)
{
    std::vector<std::string> lw;
    for (const auto& w : sentence_words) lw.push_back(unicode::to_lower(w));
    const std::string text = join(lw);
    double best = 0;
    for (const auto& p : patterns) {
        if (p.weight <= best) continue;
        std::regex re(detail::instantiate(p.source, query_terms), std::regex::ECMAScript | std::regex::icase);
        if (std::regex_search(text, re)) best = p.weight;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Candidates and component scores

struct Components {
    double tcs = 0, ps = 0, ncs = 0, sss = 0, pms = 0;

    std::map<std::string, double> to_map() const
    {
        return {{"TCS", tcs}, {"PS", ps}, {"NCS", ncs}, {"SSS", sss}, {"PMS", pms}};
    }
};

struct ScoringWeights {
    std::array<double, 4> factoid = {0.31, 0.18, 0.39, 0.12};
    std::array<double, 5> descriptive = {0.21, 0.09, 0.23, 0.19, 0.28};

    void validate() const
    {
        for (double w : factoid)
            if (!(w >= 0)) throw input_error("factoid weights must be non-negative");
        for (double w : descriptive)
            if (!(w >= 0)) throw input_error("descriptive weights must be non-negative");
    }
};

inline double aggregate(const Components& c, const ScoringWeights& w, QType qtype)
{
    if (qtype == QType::factoid)
        return w.factoid[0] * c.tcs + w.factoid[1] * c.ps + w.factoid[2] * c.ncs + w.factoid[3] * c.sss;
    return w.descriptive[0] * c.tcs + w.descriptive[1] * c.ps + w.descriptive[2] * c.ncs +
           w.descriptive[3] * c.sss + w.descriptive[4] * c.pms;
}

/// A sentence that may hold an answer, with its source passage and its
/// position in retrieval order.
struct CandidateSentence {
    AnnotatedSentence sentence;
    std::string passage_id;
    std::size_t order = 0;
};

struct CandidateAnswer {
    std::string text;
    std::size_t sentence_id = 0;
    std::string passage_id;
    std::optional<NeType> ne_type;
    Span span;
    Components components;
    double aggregate = 0;
};

/// Factoid: spans matching the answer type (NE labels or token-aligned regex
/// matches, longest first). Descriptive: one candidate per sentence.
inline std::vector<CandidateAnswer> extract_candidates(const std::vector<CandidateSentence>& sentences,
                                                       const std::string& answer_type, QType qtype,
                                                       const AnswerTypeMap& types = default_answer_types(),
                                                       std::size_t max_regex_tokens = 6)
{
    std::vector<CandidateAnswer> out;
    if (qtype == QType::descriptive) {
        for (const auto& cs : sentences)
            out.push_back({detokenize(surfaces(cs.sentence.tokens)), cs.order, cs.passage_id, std::nullopt,
                           Span{0, cs.sentence.size()}, {}, 0});
        return out;
    }
    const auto& rules = types.rules(answer_type);
    std::vector<std::regex> regexes;
    std::set<NeType> wanted;
    for (const auto& r : rules) {
        if (r.ne) wanted.insert(*r.ne);
        if (r.regex) regexes.emplace_back(*r.regex, std::regex::ECMAScript | std::regex::icase);
    }
    for (const auto& cs : sentences) {
        const auto words = surfaces(cs.sentence.tokens);
        std::vector<CandidateAnswer> found;
        for (const auto& ne : cs.sentence.ne_spans) {
            if (!wanted.count(ne.type)) continue;
            std::vector<std::string> span_words(words.begin() + static_cast<std::ptrdiff_t>(ne.span.start),
                                                words.begin() + static_cast<std::ptrdiff_t>(ne.span.end));
            found.push_back({detokenize(span_words), cs.order, cs.passage_id, ne.type, ne.span, {}, 0});
        }
        if (!regexes.empty()) {
            std::size_t i = 0;
            while (i < words.size()) {
                std::size_t matched = 0;
                for (std::size_t len = std::min(max_regex_tokens, words.size() - i); len > 0 && !matched; --len) {
                    std::vector<std::string> part(words.begin() + static_cast<std::ptrdiff_t>(i),
                                                  words.begin() + static_cast<std::ptrdiff_t>(i + len));
                    const auto text = join(part);
                    for (const auto& re : regexes)
                        if (std::regex_match(text, re)) {
                            matched = len;
                            break;
                        }
                }
                if (matched) {
                    std::vector<std::string> part(words.begin() + static_cast<std::ptrdiff_t>(i),
                                                  words.begin() + static_cast<std::ptrdiff_t>(i + matched));
                    found.push_back({join(part), cs.order, cs.passage_id, std::nullopt, Span{i, i + matched}, {}, 0});
                    i += matched;
                } else {
                    ++i;
                }
            }
        }
        std::stable_sort(found.begin(), found.end(),
                         [](const CandidateAnswer& a, const CandidateAnswer& b) { return a.span < b.span; });
        for (auto& c : found) out.push_back(std::move(c));
    }
    return out;
}

/// Share of distinct query terms found in the sentence.
inline double term_coverage(const std::vector<std::string>& query, const std::vector<std::string>& sentence)
{
    std::set<std::string> q(query.begin(), query.end());
    if (q.empty()) return 0.0;
    std::set<std::string> s(sentence.begin(), sentence.end());
    std::size_t present = 0;
    for (const auto& t : q) present += s.count(t);
    return static_cast<double>(present) / static_cast<double>(q.size());
}

/// Present distinct query terms divided by the length of the shortest window
/// of the sentence containing all of them; 0 when none is present.
inline double proximity(const std::vector<std::string>& query, const std::vector<std::string>& sentence)
{
    std::set<std::string> q(query.begin(), query.end());
    std::set<std::string> present;
    for (const auto& w : sentence)
        if (q.count(w)) present.insert(w);
    if (present.empty()) return 0.0;

    std::map<std::string, std::size_t> inside;
    std::size_t covered = 0, best = sentence.size(), lo = 0;
    for (std::size_t hi = 0; hi < sentence.size(); ++hi) {
        if (present.count(sentence[hi]) && inside[sentence[hi]]++ == 0) ++covered;
        while (covered == present.size()) {
            best = std::min(best, hi - lo + 1);
            const auto& w = sentence[lo];
            if (present.count(w) && --inside[w] == 0) --covered;
            ++lo;
        }
    }
    return static_cast<double>(present.size()) / static_cast<double>(best);
}

/// Clipped n-gram overlap over the query's n-gram count; 0 when the query
/// has fewer than n terms.
inline double ngram_coverage(const std::vector<std::string>& query, const std::vector<std::string>& sentence,
                             std::size_t n)
{
    if (n == 0 || query.size() < n) return 0.0;
    auto grams = [n](const std::vector<std::string>& w) {
        std::map<std::vector<std::string>, std::size_t> c;
        for (std::size_t i = 0; i + n <= w.size(); ++i)
            ++c[std::vector<std::string>(w.begin() + static_cast<std::ptrdiff_t>(i),
                                         w.begin() + static_cast<std::ptrdiff_t>(i + n))];
        return c;
    };
    const auto qg = grams(query);
    const auto sg = grams(sentence);
    std::size_t common = 0, total = 0;
    for (const auto& [g, c] : qg) {
        total += c;
        auto it = sg.find(g);
        if (it != sg.end()) common += std::min(c, it->second);
    }
    return static_cast<double>(common) / static_cast<double>(total);
}

/// Sum of n-gram coverages for n = 1..max_n divided by 1 + 2 + ... + max_n.
inline double ngram_score(const std::vector<std::string>& query, const std::vector<std::string>& sentence,
                          std::size_t max_n = 4)
{
    double sum = 0;
    for (std::size_t n = 1; n <= max_n; ++n) sum += ngram_coverage(query, sentence, n);
    return sum / static_cast<double>(max_n * (max_n + 1) / 2);
}

/// Cosine of tf-idf weighted word-vector averages (one-hot vectors without
/// embeddings), clamped to [0,1].
inline double semantic_similarity(const std::vector<std::string>& query, const std::vector<std::string>& sentence,
                                  const retrieval::IdfTable& idf, const retrieval::EmbeddingLexicon* emb = nullptr)
{
    auto tf = [](const std::vector<std::string>& w) {
        std::map<std::string, int> c;
        for (const auto& x : w) ++c[x];
        return c;
    };
    const auto tq = tf(query);
    const auto ts = tf(sentence);
    if (!emb) {
        retrieval::detail::SparseVec a, b;
        for (const auto& [w, f] : tq) a[w] = f * idf.idf(w);
        for (const auto& [w, f] : ts) b[w] = f * idf.idf(w);
        return std::clamp(retrieval::detail::cosine(a, b), 0.0, 1.0);
    }
    auto vec = [&](const std::map<std::string, int>& t) {
        std::vector<double> v(emb->dim(), 0.0);
        std::size_t lookups = 0;
        for (const auto& [w, f] : t) {
            const auto* e = emb->find(w);
            if (!e) continue;
            lookups += static_cast<std::size_t>(f);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += (*e)[k] * f * idf.idf(w);
        }
        if (lookups)
            for (auto& x : v) x /= static_cast<double>(lookups);
        return v;
    };
    return std::clamp(retrieval::detail::cosine(vec(tq), vec(ts)), 0.0, 1.0);
}

struct ScoringContext {
    const retrieval::IdfTable* idf = nullptr;
    const retrieval::EmbeddingLexicon* emb = nullptr;
    const std::vector<Pattern>* patterns = nullptr;
    const retrieval::StopwordSet* stopwords = nullptr;
};

/// Scores one sentence against a query. `query` holds lowercased query
/// terms; the sentence is normalized the same way (lowercase, stopwords and
/// punctuation removed) except for pattern matching, which sees every token.
inline Components score_components(const std::vector<std::string>& sentence_words,
                                   const std::vector<std::string>& query, QType qtype, const ScoringContext& ctx)
{
    static const retrieval::StopwordSet no_stop;
    static const retrieval::IdfTable no_idf;
    const auto terms = retrieval::content_terms(sentence_words, ctx.stopwords ? *ctx.stopwords : no_stop);
    Components c;
    c.tcs = term_coverage(query, terms);
    c.ps = proximity(query, terms);
    c.ncs = ngram_score(query, terms);
    c.sss = semantic_similarity(query, terms, ctx.idf ? *ctx.idf : no_idf, ctx.emb);
    if (qtype == QType::descriptive && ctx.patterns) c.pms = pattern_score(*ctx.patterns, query, sentence_words);
    return c;
}

struct RankOptions {
    double tau = 0.9;
};

struct RankedAnswers {
    bool no_answer = true;
    /// Candidates by aggregate, descending; ties keep extraction order.
    std::vector<CandidateAnswer> ordered;
    std::string answer;
    double score = 0;
    /// Sentences making up a descriptive answer, in document order.
    std::vector<std::size_t> assembled;
};

/// Fills aggregates and ranks. Factoid: the best candidate. Descriptive: the
/// best sentence plus every sentence of the same passage scoring at least
/// tau times the best, joined in document order.
inline RankedAnswers rank_answers(std::vector<CandidateAnswer> candidates, const ScoringWeights& weights, QType qtype,
                                  const RankOptions& opts = {})
{
    RankedAnswers out;
    if (candidates.empty()) return out;
    for (auto& c : candidates) c.aggregate = aggregate(c.components, weights, qtype);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const CandidateAnswer& a, const CandidateAnswer& b) { return a.aggregate > b.aggregate; });
    out.no_answer = false;
    out.ordered = std::move(candidates);
    const auto& best = out.ordered.front();
    out.score = best.aggregate;
    if (qtype == QType::factoid) {
        out.answer = best.text;
        out.assembled = {best.sentence_id};
        return out;
    }
    std::vector<const CandidateAnswer*> keep;
    for (const auto& c : out.ordered)
        if (&c == &best || (c.passage_id == best.passage_id && c.aggregate >= opts.tau * best.aggregate))
            keep.push_back(&c);
    std::sort(keep.begin(), keep.end(),
              [](const CandidateAnswer* a, const CandidateAnswer* b) { return a->sentence_id < b->sentence_id; });
    std::vector<std::string> parts;
    for (const auto* c : keep) {
        parts.push_back(c->text);
        out.assembled.push_back(c->sentence_id);
    }
    out.answer = join(parts);
    return out;
}

}  // namespace cmforge::qa
