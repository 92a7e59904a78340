#pragma once

// Lexical translation model trained by EM (IBM Model 1 counts reweighted by
// a diagonal position prior, in the spirit of fast_align), Viterbi word
// alignment with optional intersection symmetrization, and extraction of
// alignment-consistent phrase pairs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmforge/corpus.hpp"
#include "cmforge/error.hpp"

namespace cmforge::align {

enum class Direction { forward, reverse };
enum class Mode { forward, reverse, intersection };

inline Mode parse_mode(std::string_view s)
{
    if (s == "forward") return Mode::forward;
    if (s == "reverse") return Mode::reverse;
    if (s == "intersection") return Mode::intersection;
    throw input_error("unknown alignment mode '" + std::string(s) + "' (forward|reverse|intersection)");
}

inline constexpr double kFloorProb = 1e-9;
inline constexpr const char* kNullWord = "<null>";

struct TrainOptions {
    int iterations = 5;
    /// Strength of the diagonal prior; 0 gives plain IBM Model 1.
    double tension = 4.0;
    /// Fixed prior mass of the NULL source position.
    double null_prior = 0.08;
    bool lowercase = true;
};

namespace detail {

class Vocabulary {
public:
    std::uint32_t add(const std::string& w)
    {
        auto [it, inserted] = ids_.try_emplace(w, static_cast<std::uint32_t>(words_.size()));
        if (inserted) words_.push_back(w);
        return it->second;
    }

    std::optional<std::uint32_t> find(const std::string& w) const
    {
        auto it = ids_.find(w);
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& word(std::uint32_t id) const { return words_[id]; }
    std::size_t size() const noexcept { return words_.size(); }

private:
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::string> words_;
};

inline std::uint64_t key(std::uint32_t src, std::uint32_t tgt)
{
    return (static_cast<std::uint64_t>(src) << 32) | tgt;
}

/// Unnormalized diagonal prior for source position i (of n) and target
/// position j (of m), 0-based.
inline double diagonal(std::size_t i, std::size_t j, std::size_t n, std::size_t m, double tension)
{
    double d = static_cast<double>(i + 1) / static_cast<double>(n) -
               static_cast<double>(j + 1) / static_cast<double>(m);
    return std::exp(-tension * std::abs(d));
}

/// Normalized prior over source positions for target position j.
inline std::vector<double> position_prior(std::size_t j, std::size_t n, std::size_t m, double tension)
{
    std::vector<double> p(n);
    double z = 0;
    for (std::size_t i = 0; i < n; ++i) z += (p[i] = diagonal(i, j, n, m, tension));
    for (auto& v : p) v /= z;
    return p;
}

inline std::string fmt_double(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// p(target word | source word). Source id 0 is the NULL word.
class TranslationModel {
public:
    TranslationModel() { src_.add(kNullWord); }

    double prob(const std::string& src, const std::string& tgt) const
    {
        auto s = src_.find(normalize(src));
        auto t = tgt_.find(normalize(tgt));
        if (!s || !t) return kFloorProb;
        return prob_ids(*s, *t);
    }

    double null_prob(const std::string& tgt) const { return prob(kNullWord, tgt); }

    bool knows_source(const std::string& w) const { return src_.find(normalize(w)).has_value(); }
    bool knows_target(const std::string& w) const { return tgt_.find(normalize(w)).has_value(); }

    double tension() const noexcept { return tension_; }
    double null_prior() const noexcept { return null_prior_; }
    int iterations() const noexcept { return iterations_; }
    Direction direction() const noexcept { return direction_; }
    bool lowercase() const noexcept { return lowercase_; }

    /// Corpus log-likelihood before each M-step, followed by the value under
    /// the final parameters. Empty for loaded models.
    const std::vector<double>& log_likelihood() const noexcept { return ll_; }

    std::set<std::string> vocab_src() const
    {
        std::set<std::string> out;
        for (std::size_t i = 1; i < src_.size(); ++i) out.insert(src_.word(static_cast<std::uint32_t>(i)));
        return out;
    }

    std::set<std::string> vocab_tgt() const
    {
        std::set<std::string> out;
        for (std::size_t i = 0; i < tgt_.size(); ++i) out.insert(tgt_.word(static_cast<std::uint32_t>(i)));
        return out;
    }

    /// Conditional distribution p(.|src) keyed by target word.
    std::map<std::string, double> distribution(const std::string& src) const
    {
        std::map<std::string, double> out;
        auto s = src_.find(normalize(src));
        if (!s) return out;
        for (const auto& [k, v] : t_)
            if ((k >> 32) == *s) out[tgt_.word(static_cast<std::uint32_t>(k & 0xffffffffu))] = v;
        return out;
    }

    /// Sorted "src<TAB>tgt<TAB>prob" lines after a "#tension=.. #iters=.." header.
    void dump(std::ostream& out) const
    {
        out << "#tension=" << detail::fmt_double(tension_) << " #iters=" << iterations_;
        if (null_prior_ != TrainOptions{}.null_prior) out << " #null=" << detail::fmt_double(null_prior_);
        if (!lowercase_) out << " #lowercase=0";
        out << '\n';
        std::vector<std::tuple<std::string, std::string, double>> rows;
        rows.reserve(t_.size());
        for (const auto& [k, v] : t_)
            rows.emplace_back(src_.word(static_cast<std::uint32_t>(k >> 32)),
                              tgt_.word(static_cast<std::uint32_t>(k & 0xffffffffu)), v);
        std::sort(rows.begin(), rows.end());
        for (const auto& [s, t, p] : rows) out << s << '\t' << t << '\t' << detail::fmt_double(p) << '\n';
    }

    static TranslationModel load(std::istream& in, Direction dir = Direction::forward)
    {
        TranslationModel m;
        m.direction_ = dir;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            cmforge::detail::strip_cr(line);
            if (line.empty()) continue;
            if (line[0] == '#') {
                std::istringstream hs(line);
                std::string field;
                while (hs >> field) {
                    auto eq = field.find('=');
                    if (eq == std::string::npos) continue;
                    auto name = field.substr(0, eq);
                    auto value = field.substr(eq + 1);
                    try {
                        if (name == "#tension") m.tension_ = std::stod(value);
                        else if (name == "#iters") m.iterations_ = std::stoi(value);
                        else if (name == "#null") m.null_prior_ = std::stod(value);
                        else if (name == "#lowercase") m.lowercase_ = value != "0";
                    } catch (const std::exception&) {
                        throw parse_error(lineno, "bad header field '" + field + "'");
                    }
                }
                continue;
            }
            auto cols = cmforge::detail::split(line, '\t');
            if (cols.size() != 3) throw parse_error(lineno, "expected 3 fields");
            double p;
            try {
                std::size_t used = 0;
                p = std::stod(cols[2], &used);
                if (used != cols[2].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw parse_error(lineno, "non-numeric probability '" + cols[2] + "'");
            }
            if (p < 0 || p > 1) throw parse_error(lineno, "probability out of [0,1]");
            auto s = m.src_.add(cols[0]);
            auto t = m.tgt_.add(cols[1]);
            m.t_[detail::key(s, t)] = p;
        }
        return m;
    }

private:
    friend TranslationModel train_model(const std::vector<ParallelPair>&, const TrainOptions&, Direction);

    std::string normalize(const std::string& w) const
    {
        if (w == kNullWord) return w;
        return lowercase_ ? unicode::to_lower(w) : w;
    }

    double prob_ids(std::uint32_t s, std::uint32_t t) const
    {
        auto it = t_.find(detail::key(s, t));
        return it == t_.end() ? kFloorProb : it->second;
    }

    detail::Vocabulary src_, tgt_;
    std::unordered_map<std::uint64_t, double> t_;
    double tension_ = 4.0;
    double null_prior_ = 0.08;
    int iterations_ = 0;
    Direction direction_ = Direction::forward;
    bool lowercase_ = true;
    std::vector<double> ll_;
};

/// EM training. For `Direction::reverse` the pairs are read target-to-source,
/// giving p(source word | target word).
inline TranslationModel train_model(const std::vector<ParallelPair>& pairs, const TrainOptions& opts = {},
                                    Direction dir = Direction::forward)
{
    if (pairs.empty()) throw input_error("cannot train a translation model on an empty corpus");
    if (opts.iterations < 1) throw input_error("iterations must be >= 1");
    if (opts.tension < 0) throw input_error("tension must be non-negative");
    if (!(opts.null_prior >= 0 && opts.null_prior < 1)) throw input_error("null prior must be in [0,1)");

    TranslationModel m;
    m.tension_ = opts.tension;
    m.null_prior_ = opts.null_prior;
    m.iterations_ = opts.iterations;
    m.direction_ = dir;
    m.lowercase_ = opts.lowercase;

    // Corpus as id sequences.
    std::vector<std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>>> corpus;
    corpus.reserve(pairs.size());
    for (const auto& p : pairs) {
        const auto& src = dir == Direction::forward ? p.source : p.target;
        const auto& tgt = dir == Direction::forward ? p.target : p.source;
        std::vector<std::uint32_t> s, t;
        for (const auto& tok : src) s.push_back(m.src_.add(m.normalize(tok.surface)));
        for (const auto& tok : tgt) t.push_back(m.tgt_.add(m.normalize(tok.surface)));
        corpus.emplace_back(std::move(s), std::move(t));
    }

    // Uniform start over the target vocabulary for every co-occurring pair.
    const double uniform = 1.0 / static_cast<double>(m.tgt_.size());
    for (const auto& [s, t] : corpus)
        for (auto f : t) {
            m.t_.try_emplace(detail::key(0, f), uniform);
            for (auto e : s) m.t_.try_emplace(detail::key(e, f), uniform);
        }

    const double p0 = opts.null_prior;
    std::unordered_map<std::uint64_t, double> counts;
    counts.reserve(m.t_.size());

    auto e_step = [&](bool accumulate) {
        double ll = 0;
        std::vector<double> post;
        for (const auto& [s, t] : corpus) {
            const std::size_t n = s.size(), mlen = t.size();
            post.resize(n);
            for (std::size_t j = 0; j < mlen; ++j) {
                const auto f = t[j];
                auto prior = detail::position_prior(j, n, mlen, opts.tension);
                const double null_mass = p0 * m.prob_ids(0, f);
                double z = null_mass;
                for (std::size_t i = 0; i < n; ++i) {
                    post[i] = (1 - p0) * prior[i] * m.prob_ids(s[i], f);
                    z += post[i];
                }
                ll += std::log(z);
                if (!accumulate) continue;
                counts[detail::key(0, f)] += null_mass / z;
                for (std::size_t i = 0; i < n; ++i) counts[detail::key(s[i], f)] += post[i] / z;
            }
        }
        return ll;
    };

    for (int it = 0; it < opts.iterations; ++it) {
        for (auto& [k, v] : counts) v = 0;
        m.ll_.push_back(e_step(true));
        std::vector<double> totals(m.src_.size(), 0.0);
        for (const auto& [k, v] : counts) totals[k >> 32] += v;
        for (auto& [k, v] : m.t_) {
            double tot = totals[k >> 32];
            auto c = counts.find(k);
            v = tot > 0 && c != counts.end() ? c->second / tot : 0.0;
        }
    }
    m.ll_.push_back(e_step(false));
    return m;
}

struct Link {
    std::size_t source = 0;
    std::size_t target = 0;

    friend bool operator==(const Link&, const Link&) = default;
    friend auto operator<=>(const Link&, const Link&) = default;
};

struct AlignmentLinks {
    std::string pair_id;
    std::vector<Link> links;  // sorted, unique
    /// Words unknown to the models; their links rest on the floor probability.
    std::vector<std::string> diagnostics;

    bool contains(Link l) const { return std::binary_search(links.begin(), links.end(), l); }
};

namespace detail {

// Links each position of `tgt` to its best `src` position or to NULL.
inline std::vector<std::optional<std::size_t>> viterbi(const TranslationModel& model,
                                                        const std::vector<Token>& src,
                                                        const std::vector<Token>& tgt)
{
    std::vector<std::optional<std::size_t>> out(tgt.size());
    const double p0 = model.null_prior();
    for (std::size_t j = 0; j < tgt.size(); ++j) {
        auto prior = position_prior(j, src.size(), tgt.size(), model.tension());
        double best = -1;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < src.size(); ++i) {
            double score = (1 - p0) * prior[i] * model.prob(src[i].surface, tgt[j].surface);
            if (score > best) {
                best = score;
                best_i = i;
            }
        }
        double null_score = p0 * model.null_prob(tgt[j].surface);
        if (!src.empty() && best >= null_score) out[j] = best_i;
    }
    return out;
}

}  // namespace detail

/// Viterbi alignment of one pair. `forward` is p(target|source), `reverse` is
/// p(source|target); the reverse model is only consulted for the reverse and
/// intersection modes.
inline AlignmentLinks align_pair(const TranslationModel& forward, const TranslationModel& reverse,
                                 const ParallelPair& pair, Mode mode = Mode::intersection)
{
    AlignmentLinks out;
    out.pair_id = pair.id;

    std::set<std::string> unknown;
    for (const auto& t : pair.source)
        if (!forward.knows_source(t.surface)) unknown.insert("source:" + t.surface);
    for (const auto& t : pair.target)
        if (!forward.knows_target(t.surface)) unknown.insert("target:" + t.surface);
    out.diagnostics.assign(unknown.begin(), unknown.end());

    std::vector<Link> fwd, rev;
    if (mode != Mode::reverse) {
        auto a = detail::viterbi(forward, pair.source, pair.target);
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a[j]) fwd.push_back({*a[j], j});
        std::sort(fwd.begin(), fwd.end());
    }
    if (mode != Mode::forward) {
        auto a = detail::viterbi(reverse, pair.target, pair.source);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a[i]) rev.push_back({i, *a[i]});
        std::sort(rev.begin(), rev.end());
    }
    switch (mode) {
    case Mode::forward: out.links = std::move(fwd); break;
    case Mode::reverse: out.links = std::move(rev); break;
    case Mode::intersection:
        std::set_intersection(fwd.begin(), fwd.end(), rev.begin(), rev.end(), std::back_inserter(out.links));
        break;
    }
    return out;
}

/// Pharaoh format: space-separated "i-j".
inline std::string to_pharaoh(const std::vector<Link>& links)
{
    std::string out;
    for (std::size_t k = 0; k < links.size(); ++k) {
        if (k) out.push_back(' ');
        out += std::to_string(links[k].source) + "-" + std::to_string(links[k].target);
    }
    return out;
}

inline std::vector<Link> parse_pharaoh(std::string_view line)
{
    std::vector<Link> out;
    for (const auto& item : cmforge::detail::split_ws(line)) {
        auto dash = item.find('-');
        if (dash == std::string::npos || dash == 0 || dash + 1 == item.size())
            throw input_error("bad alignment link '" + item + "'");
        try {
            std::size_t a = 0, b = 0;
            auto i = std::stoul(item.substr(0, dash), &a);
            auto j = std::stoul(item.substr(dash + 1), &b);
            if (a != dash || b != item.size() - dash - 1) throw std::invalid_argument("junk");
            out.push_back({i, j});
        } catch (const std::exception&) {
            throw input_error("bad alignment link '" + item + "'");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::vector<std::vector<Link>> load_pharaoh(const std::string& path)
{
    auto in = cmforge::detail::open_input(path);
    std::vector<std::vector<Link>> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        try {
            out.push_back(parse_pharaoh(line));
        } catch (const input_error& e) {
            throw parse_error(lineno, e.what());
        }
    }
    return out;
}

inline void check_links(const std::vector<Link>& links, std::size_t src_len, std::size_t tgt_len)
{
    for (const auto& l : links)
        if (l.source >= src_len || l.target >= tgt_len)
            throw input_error("alignment link " + std::to_string(l.source) + "-" + std::to_string(l.target) +
                              " out of bounds");
}

// ---------------------------------------------------------------------------
// Phrase extraction

struct PhrasePair {
    Span source;
    Span target;

    friend bool operator==(const PhrasePair&, const PhrasePair&) = default;
    friend auto operator<=>(const PhrasePair&, const PhrasePair&) = default;
};

struct PhraseTable {
    std::string pair_id;
    std::vector<PhrasePair> entries;  // sorted
    std::size_t max_len = 7;
};

/// All alignment-consistent phrase pairs with both sides at most `max_len`
/// tokens, including extensions over unaligned target words.
inline PhraseTable extract_phrases(std::size_t src_len, std::size_t tgt_len, const std::vector<Link>& links,
                                   std::size_t max_len)
{
    if (max_len == 0) throw input_error("max phrase length must be positive");
    check_links(links, src_len, tgt_len);
    PhraseTable table;
    table.max_len = max_len;

    std::vector<std::vector<std::size_t>> tgt_to_src(tgt_len);
    std::vector<bool> tgt_aligned(tgt_len, false);
    for (const auto& l : links) {
        tgt_to_src[l.target].push_back(l.source);
        tgt_aligned[l.target] = true;
    }

    for (std::size_t s1 = 0; s1 < src_len; ++s1) {
        for (std::size_t s2 = s1 + 1; s2 <= std::min(src_len, s1 + max_len); ++s2) {
            // Tight target projection of the source span.
            std::size_t t_min = tgt_len, t_max = 0;
            bool any = false;
            for (const auto& l : links) {
                if (l.source >= s1 && l.source < s2) {
                    t_min = std::min(t_min, l.target);
                    t_max = std::max(t_max, l.target);
                    any = true;
                }
            }
            if (!any) continue;
            if (t_max - t_min + 1 > max_len) continue;
            bool consistent = true;
            for (std::size_t t = t_min; t <= t_max && consistent; ++t)
                for (auto s : tgt_to_src[t])
                    if (s < s1 || s >= s2) {
                        consistent = false;
                        break;
                    }
            if (!consistent) continue;
            // Extend over unaligned target words on either side.
            for (std::size_t ts = t_min + 1; ts-- > 0;) {
                if (ts < t_min && tgt_aligned[ts]) break;
                for (std::size_t te = t_max + 1; te <= tgt_len; ++te) {
                    if (te > t_max + 1 && tgt_aligned[te - 1]) break;
                    if (te - ts > max_len) break;
                    table.entries.push_back({Span{s1, s2}, Span{ts, te}});
                }
            }
        }
    }
    std::sort(table.entries.begin(), table.entries.end());
    return table;
}

inline PhraseTable extract_phrases(const ParallelPair& pair, const AlignmentLinks& links, std::size_t max_len)
{
    auto table = extract_phrases(pair.source.size(), pair.target.size(), links.links, max_len);
    table.pair_id = pair.id;
    return table;
}

/// Minimal target span paired with exactly `source` (or, with `containment`,
/// with the smallest extracted source span containing it).
inline std::optional<Span> lookup_aligned_span(const PhraseTable& table, Span source, bool containment = false)
{
    std::optional<PhrasePair> best;
    auto better = [](const PhrasePair& a, const PhrasePair& b) {
        if (a.source.size() != b.source.size()) return a.source.size() < b.source.size();
        if (a.target.size() != b.target.size()) return a.target.size() < b.target.size();
        return a < b;
    };
    for (const auto& e : table.entries) {
        bool match = containment ? e.source.contains(source) : e.source == source;
        if (match && (!best || better(e, *best))) best = e;
    }
    if (!best) return std::nullopt;
    return best->target;
}

}  // namespace cmforge::align
