#pragma once

// Code-mixed text synthesis: context-driven lexical translation choice,
// question generation from an annotated Hindi-side question, and sentence
// generation from an aligned parallel pair under the matrix-language frame.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cmforge/aligner.hpp"
#include "cmforge/corpus.hpp"
#include "cmforge/lexres.hpp"

namespace cmforge::mix {

enum class Provenance { kept, transliterated, lexicon_translated, phrase_substituted };

inline std::string to_string(Provenance p)
{
    switch (p) {
    case Provenance::kept: return "kept";
    case Provenance::transliterated: return "transliterated";
    case Provenance::lexicon_translated: return "lexicon-translated";
    case Provenance::phrase_substituted: return "phrase-substituted";
    }
    return "kept";
}

inline Provenance parse_provenance(std::string_view s)
{
    if (s == "kept") return Provenance::kept;
    if (s == "transliterated") return Provenance::transliterated;
    if (s == "lexicon-translated") return Provenance::lexicon_translated;
    if (s == "phrase-substituted") return Provenance::phrase_substituted;
    throw input_error("unknown provenance '" + std::string(s) + "'");
}

struct TaggedToken {
    std::string surface;
    LanguageTag lang;
    Provenance provenance = Provenance::kept;

    friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct TaggedSentence {
    std::string id;
    std::vector<TaggedToken> tokens;

    std::vector<std::string> words() const
    {
        std::vector<std::string> out;
        for (const auto& t : tokens) out.push_back(t.surface);
        return out;
    }

    /// Tokens joined by single spaces.
    std::string text() const { return join(words()); }
    std::string display() const { return detokenize(words()); }

    std::size_t substitutions() const
    {
        return static_cast<std::size_t>(std::count_if(tokens.begin(), tokens.end(), [](const TaggedToken& t) {
            return t.provenance != Provenance::kept;
        }));
    }
};

// ---------------------------------------------------------------------------
// Best lexical translation

struct DisambigOptions {
    /// Convergence threshold on the largest per-candidate weight change.
    double epsilon = 1e-4;
    int max_iters = 100;
    lex::DiceVariant dice = lex::DiceVariant::as_written;
};

/// Candidate graph over a context window. Nodes are grouped by the window
/// token they translate; edges only join candidates of different tokens.
struct DisambigGraph {
    struct Node {
        std::size_t group = 0;  // position in the window
        std::string word;
        double lex_prob = 0;
    };

    std::vector<Node> nodes;
    std::vector<std::vector<double>> weight;  // Dice, 0 within a group
    std::vector<std::size_t> window;           // sentence indices of the groups
};

struct DisambigResult {
    std::string translation;
    int iterations = 0;
    /// Final normalized weights of the target token's candidates, in lexicon order.
    std::vector<std::pair<std::string, double>> weights;
};

inline DisambigGraph build_disambig_graph(const std::vector<std::string>& tokens, std::size_t index,
                                          const lex::LexTable& lextable, const lex::NGramStore& ngrams,
                                          lex::DiceVariant variant = lex::DiceVariant::as_written)
{
    DisambigGraph g;
    const std::size_t lo = index == 0 ? 0 : index - 1;
    const std::size_t hi = std::min(tokens.size(), index + 2);
    for (std::size_t k = lo; k < hi; ++k) {
        g.window.push_back(k);
        for (const auto& c : lextable.translations_for(tokens[k]))
            g.nodes.push_back({g.window.size() - 1, c.target, c.prob});
    }
    const std::size_t n = g.nodes.size();
    g.weight.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (g.nodes[x].group != g.nodes[y].group)
                g.weight[x][y] = lex::dice(ngrams, g.nodes[x].word, g.nodes[y].word, variant);
    return g;
}

/// Picks the translation of tokens[index] by iterative re-weighting of the
/// candidate graph over the window {index-1, index, index+1}: start from
/// uniform weights per token, add Dice-weighted neighbour mass, renormalize
/// per token, stop once no weight moves by epsilon or more. Ties go to the
/// higher lexicon probability, then to the lexicographically smaller word.
inline DisambigResult best_lexical_translation(const std::vector<std::string>& tokens, std::size_t index,
                                               const lex::LexTable& lextable, const lex::NGramStore& ngrams,
                                               const DisambigOptions& opts = {})
{
    if (index >= tokens.size()) throw input_error("token index out of range");
    const auto& own = lextable.translations_for(tokens[index]);
    if (own.empty()) throw input_error("no lexicon candidates for '" + tokens[index] + "'");

    DisambigResult result;
    if (own.size() == 1) {
        result.translation = own.front().target;
        result.weights = {{own.front().target, 1.0}};
        return result;
    }

    const auto g = build_disambig_graph(tokens, index, lextable, ngrams, opts.dice);
    const std::size_t n = g.nodes.size();
    std::vector<std::size_t> group_size(g.window.size(), 0);
    for (const auto& node : g.nodes) ++group_size[node.group];

    std::vector<double> w(n);
    for (std::size_t x = 0; x < n; ++x) w[x] = 1.0 / static_cast<double>(group_size[g.nodes[x].group]);

    std::vector<double> next(n);
    while (result.iterations < opts.max_iters) {
        for (std::size_t x = 0; x < n; ++x) {
            double s = w[x];
            for (std::size_t y = 0; y < n; ++y) s += g.weight[x][y] * w[y];
            next[x] = s;
        }
        std::vector<double> total(g.window.size(), 0.0);
        for (std::size_t x = 0; x < n; ++x) total[g.nodes[x].group] += next[x];
        double delta = 0;
        for (std::size_t x = 0; x < n; ++x) {
            next[x] /= total[g.nodes[x].group];
            delta = std::max(delta, std::abs(next[x] - w[x]));
        }
        w.swap(next);
        ++result.iterations;
        if (delta < opts.epsilon) break;
    }

    const std::size_t target_group = static_cast<std::size_t>(
        std::find(g.window.begin(), g.window.end(), index) - g.window.begin());
    std::optional<std::size_t> best;
    for (std::size_t x = 0; x < n; ++x) {
        if (g.nodes[x].group != target_group) continue;
        result.weights.emplace_back(g.nodes[x].word, w[x]);
        if (!best) {
            best = x;
            continue;
        }
        const auto& b = g.nodes[*best];
        const auto& c = g.nodes[x];
        const double dw = w[x] - w[*best];
        if (dw > 1e-12 || (std::abs(dw) <= 1e-12 &&
                           (c.lex_prob > b.lex_prob || (c.lex_prob == b.lex_prob && c.word < b.word))))
            best = x;
    }
    result.translation = g.nodes[*best].word;
    return result;
}

// ---------------------------------------------------------------------------
// Question generation

struct QuestionOptions {
    DisambigOptions disambig;
    /// Language assigned to lexicon translations.
    LanguageTag embedded_lang{"en"};
    /// PoS tags whose tokens are translated.
    std::vector<std::string> translate_pos = {"NN", "NNP", "NST", "JJ"};
    /// Title-case transliterated PER tokens.
    bool capitalize_names = true;
};

/// Per token: PER entities are transliterated; nouns, spatio-temporal nouns,
/// adjectives and LOC/ORG entities get their best lexical translation
/// (transliterated instead when the lexicon has nothing); everything else is
/// transliterated.
inline TaggedSentence generate_cm_question(const AnnotatedSentence& q, const lex::LexTable& lextable,
                                           const lex::NGramStore& ngrams, const lex::TranslitTable& translit,
                                           const QuestionOptions& opts = {})
{
    TaggedSentence out;
    const auto words = surfaces(q.tokens);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& tok = q.tokens[i];
        const auto ne = q.ne_at(i);
        const std::string pos = q.pos.empty() ? "" : q.pos[i];
        const LanguageTag base_lang = tok.lang;

        auto transliterated = [&](bool name) {
            std::string s = lex::transliterate(translit, tok.surface);
            if (name && opts.capitalize_names) s = unicode::capitalize_first(s);
            return TaggedToken{s, base_lang, Provenance::transliterated};
        };

        if (ne == NeType::PER) {
            out.tokens.push_back(transliterated(true));
            continue;
        }
        const bool translate =
            std::find(opts.translate_pos.begin(), opts.translate_pos.end(), pos) != opts.translate_pos.end() ||
            ne == NeType::LOC || ne == NeType::ORG;
        if (translate && !lextable.translations_for(tok.surface).empty()) {
            auto r = best_lexical_translation(words, i, lextable, ngrams, opts.disambig);
            LanguageTag lang = unicode::letter_script(r.translation) == unicode::Script::none
                                   ? LanguageTag::other()
                                   : opts.embedded_lang;
            out.tokens.push_back({r.translation, lang, Provenance::lexicon_translated});
            continue;
        }
        out.tokens.push_back(transliterated(false));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sentence generation

enum class SpanKind { named_entity, noun_phrase, adjective };

struct SentenceOptions {
    /// Substitution passes, in order.
    std::vector<SpanKind> order = {SpanKind::named_entity, SpanKind::noun_phrase, SpanKind::adjective};
    /// Accept extracted phrases whose source side contains the English span.
    bool containment = false;
    /// Uppercase the first letter of an inserted span when the target token it
    /// replaces starts uppercase and the English word starts lowercase.
    bool transfer_case = true;
    LanguageTag embedded_lang{"en"};
    LanguageTag matrix_lang{"hi"};
    std::vector<std::string> adjective_pos = {"JJ", "JJR", "JJS", "ADJ"};
    std::vector<std::string> determiner_pos = {"DT", "DET", "PDT"};
};

/// Starts from the target sentence and, pass by pass (entities of type
/// PER/LOC/ORG, then noun phrases without determiners, then adjectives),
/// replaces each English span's aligned target span with the English words.
/// Target positions already replaced are never touched again.
inline TaggedSentence generate_cm_sentence(const ParallelPair& pair, const AnnotatedSentence& en_ann,
                                           const align::PhraseTable& phrases, const SentenceOptions& opts = {})
{
    if (en_ann.size() != pair.source.size())
        throw input_error("pair " + pair.id + ": annotation has " + std::to_string(en_ann.size()) +
                          " tokens, source has " + std::to_string(pair.source.size()));

    const std::size_t m = pair.target.size();
    std::vector<bool> consumed(m, false);
    // replacement[t] holds the English span inserted at target position t.
    std::vector<std::optional<Span>> replacement(m);

    auto is_in = [](const std::vector<std::string>& set, const std::string& tag) {
        return std::find(set.begin(), set.end(), tag) != set.end();
    };
    auto pos_at = [&](std::size_t i) { return en_ann.pos.empty() ? std::string() : en_ann.pos[i]; };

    auto substitute = [&](Span en_span) {
        if (en_span.start >= en_span.end) return;
        auto tgt = align::lookup_aligned_span(phrases, en_span, opts.containment);
        if (!tgt || tgt->end > m) return;
        for (std::size_t t = tgt->start; t < tgt->end; ++t)
            if (consumed[t]) return;
        for (std::size_t t = tgt->start; t < tgt->end; ++t) consumed[t] = true;
        replacement[tgt->start] = en_span;
    };

    for (SpanKind kind : opts.order) {
        switch (kind) {
        case SpanKind::named_entity: {
            auto spans = en_ann.ne_spans;
            std::sort(spans.begin(), spans.end(), [](const NeSpan& a, const NeSpan& b) { return a.span < b.span; });
            for (const auto& ne : spans)
                if (ne.type == NeType::PER || ne.type == NeType::LOC || ne.type == NeType::ORG) substitute(ne.span);
            break;
        }
        case SpanKind::noun_phrase: {
            auto spans = en_ann.np_spans;
            std::sort(spans.begin(), spans.end());
            for (Span np : spans) {
                while (np.start < np.end && is_in(opts.determiner_pos, pos_at(np.start))) ++np.start;
                while (np.end > np.start && is_in(opts.determiner_pos, pos_at(np.end - 1))) --np.end;
                substitute(np);
            }
            break;
        }
        case SpanKind::adjective:
            for (std::size_t i = 0; i < en_ann.size(); ++i)
                if (is_in(opts.adjective_pos, pos_at(i))) substitute(Span{i, i + 1});
            break;
        }
    }

    auto lang_of = [](const std::string& surface, const LanguageTag& lang) {
        return unicode::letter_script(surface) == unicode::Script::none ? LanguageTag::other() : lang;
    };

    TaggedSentence out;
    out.id = pair.id;
    for (std::size_t t = 0; t < m; ++t) {
        if (replacement[t]) {
            const Span en = *replacement[t];
            for (std::size_t i = en.start; i < en.end; ++i) {
                std::string w = pair.source[i].surface;
                if (opts.transfer_case && i == en.start && unicode::starts_upper(pair.target[t].surface) &&
                    unicode::starts_lower(w))
                    w = unicode::capitalize_first(w);
                out.tokens.push_back({w, lang_of(w, opts.embedded_lang), Provenance::phrase_substituted});
            }
            continue;
        }
        if (consumed[t]) continue;
        const auto& w = pair.target[t].surface;
        out.tokens.push_back({w, lang_of(w, opts.matrix_lang), Provenance::kept});
    }
    return out;
}

/// Batch output row: "id<TAB>sentence<TAB>lang tags<TAB>provenance tags".
inline void write_tagged_tsv(std::ostream& out, const TaggedSentence& s)
{
    std::vector<std::string> langs, provs;
    for (const auto& t : s.tokens) {
        langs.push_back(t.lang.code());
        provs.push_back(to_string(t.provenance));
    }
    out << s.id << '\t' << s.text() << '\t' << join(langs) << '\t' << join(provs) << '\n';
}

inline std::vector<TaggedSentence> parse_tagged_tsv(std::istream& in)
{
    std::vector<TaggedSentence> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (cmforge::detail::blank(line)) continue;
        auto cols = cmforge::detail::split(line, '\t');
        if (cols.size() != 4) throw parse_error(lineno, "expected 4 fields");
        auto words = cmforge::detail::split_ws(cols[1]);
        auto langs = cmforge::detail::split_ws(cols[2]);
        auto provs = cmforge::detail::split_ws(cols[3]);
        if (words.size() != langs.size() || words.size() != provs.size())
            throw parse_error(lineno, "token, language and provenance counts differ");
        TaggedSentence s;
        s.id = cols[0];
        for (std::size_t k = 0; k < words.size(); ++k) {
            try {
                s.tokens.push_back({words[k], LanguageTag(langs[k]), parse_provenance(provs[k])});
            } catch (const input_error& e) {
                throw parse_error(lineno, e.what());
            }
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline std::vector<TaggedSentence> load_tagged_tsv(const std::string& path)
{
    auto in = cmforge::detail::open_input(path);
    return parse_tagged_tsv(in);
}

}  // namespace cmforge::mix
