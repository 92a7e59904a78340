#pragma once

// Lexical resources behind the mixer: lexical translation tables, n-gram
// counts with Dice co-occurrence weights, and rule-table transliteration.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cmforge/corpus.hpp"
#include "cmforge/error.hpp"
#include "cmforge/unicode.hpp"

namespace cmforge::lex {

namespace detail {

inline double parse_prob(const std::string& s, std::size_t lineno)
{
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw parse_error(lineno, "non-numeric probability '" + s + "'");
    }
}

inline std::int64_t parse_count(const std::string& s, std::size_t lineno)
{
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        if (v < 0) throw std::invalid_argument("negative");
        return v;
    } catch (const std::exception&) {
        throw parse_error(lineno, "count must be a non-negative integer, got '" + s + "'");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Lexical translation table

struct LexCandidate {
    std::string target;
    double prob = 0;

    friend bool operator==(const LexCandidate&, const LexCandidate&) = default;
};

struct LexTableOptions {
    /// Candidates kept per source word.
    std::size_t top_k = 5;
    /// Alternative reading of the filtering threshold: drop candidates below
    /// this probability. 0 disables it.
    double min_prob = 0.0;
};

class LexTable {
public:
    LexTable() = default;
    explicit LexTable(std::size_t top_k) : top_k_(top_k) {}

    /// Adds a candidate and keeps the list sorted (probability descending,
    /// then target) and truncated to top_k.
    void add(const std::string& source, const std::string& target, double prob)
    {
        auto& list = forward_[unicode::nfc(source)];
        auto tgt = unicode::nfc(target);
        auto it = std::find_if(list.begin(), list.end(), [&](const LexCandidate& c) { return c.target == tgt; });
        if (it != list.end()) {
            it->prob = std::max(it->prob, prob);
        } else {
            list.push_back({tgt, prob});
        }
        std::sort(list.begin(), list.end(), [](const LexCandidate& a, const LexCandidate& b) {
            if (a.prob != b.prob) return a.prob > b.prob;
            return a.target < b.target;
        });
        if (list.size() > top_k_) list.resize(top_k_);
    }

    const std::vector<LexCandidate>& translations_for(const std::string& word) const
    {
        static const std::vector<LexCandidate> none;
        auto it = forward_.find(word);
        if (it == forward_.end()) {
            it = forward_.find(unicode::nfc(word));
            if (it == forward_.end()) return none;
        }
        return it->second;
    }

    std::size_t top_k() const noexcept { return top_k_; }
    std::size_t size() const noexcept { return forward_.size(); }
    bool empty() const noexcept { return forward_.empty(); }

    /// Sorted "src<TAB>tgt<TAB>prob" lines.
    void dump(std::ostream& out) const
    {
        std::map<std::string, const std::vector<LexCandidate>*> sorted;
        for (const auto& [k, v] : forward_) sorted[k] = &v;
        for (const auto& [src, list] : sorted)
            for (const auto& c : *list) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.17g", c.prob);
                out << src << '\t' << c.target << '\t' << buf << '\n';
            }
    }

private:
    std::unordered_map<std::string, std::vector<LexCandidate>> forward_;
    std::size_t top_k_ = 5;
};

inline LexTable parse_lex_table(std::istream& in, const LexTableOptions& opts = {})
{
    if (opts.top_k == 0) throw input_error("top_k must be positive");
    LexTable table(opts.top_k);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (cmforge::detail::blank(line) || line[0] == '#') continue;
        if (!unicode::valid_utf8(line)) throw parse_error(lineno, "invalid UTF-8");
        auto cols = cmforge::detail::split(line, '\t');
        if (cols.size() != 3) throw parse_error(lineno, "expected 3 fields");
        double p = detail::parse_prob(cols[2], lineno);
        if (!(p > 0 && p <= 1)) throw parse_error(lineno, "probability must be in (0,1]");
        if (p < opts.min_prob) continue;
        table.add(cols[0], cols[1], p);
    }
    return table;
}

inline LexTable load_lex_table(const std::string& path, const LexTableOptions& opts = {})
{
    auto in = cmforge::detail::open_input(path);
    return parse_lex_table(in, opts);
}

inline const std::vector<LexCandidate>& translations_for(const LexTable& table, const std::string& word)
{
    return table.translations_for(word);
}

// ---------------------------------------------------------------------------
// N-gram store

class NGramStore {
public:
    void add_unigram(const std::string& w, std::int64_t count) { unigram_[fold(w)] += count; }

    void add_bigram(const std::string& a, const std::string& b, std::int64_t count)
    {
        bigram_[bigram_key(fold(a), fold(b))] += count;
    }

    std::int64_t freq(const std::string& w) const
    {
        auto it = unigram_.find(fold(w));
        return it == unigram_.end() ? 0 : it->second;
    }

    /// Co-occurrence count, order-insensitive (max over both orders).
    std::int64_t freq(const std::string& a, const std::string& b) const
    {
        auto fa = fold(a), fb = fold(b);
        return std::max(lookup(bigram_key(fa, fb)), lookup(bigram_key(fb, fa)));
    }

    std::size_t unigram_count() const noexcept { return unigram_.size(); }
    std::size_t bigram_count() const noexcept { return bigram_.size(); }

    /// Multiplies every count by `factor`.
    NGramStore scaled(std::int64_t factor) const
    {
        NGramStore out = *this;
        for (auto& [k, v] : out.unigram_) v *= factor;
        for (auto& [k, v] : out.bigram_) v *= factor;
        return out;
    }

private:
    static std::string fold(const std::string& w) { return unicode::to_lower(unicode::nfc(w)); }
    static std::string bigram_key(const std::string& a, const std::string& b) { return a + '\x1f' + b; }

    std::int64_t lookup(const std::string& key) const
    {
        auto it = bigram_.find(key);
        return it == bigram_.end() ? 0 : it->second;
    }

    std::unordered_map<std::string, std::int64_t> unigram_;
    std::unordered_map<std::string, std::int64_t> bigram_;
};

/// Unigram lines "token<TAB>count", bigram lines "tok1 tok2<TAB>count".
/// Duplicate lines are summed.
inline NGramStore parse_ngrams(std::istream& unigrams, std::istream& bigrams)
{
    NGramStore store;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(unigrams, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (cmforge::detail::blank(line)) continue;
        auto cols = cmforge::detail::split(line, '\t');
        if (cols.size() != 2) throw parse_error(lineno, "expected 'token<TAB>count'");
        store.add_unigram(cols[0], detail::parse_count(cols[1], lineno));
    }
    lineno = 0;
    while (std::getline(bigrams, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (cmforge::detail::blank(line)) continue;
        auto cols = cmforge::detail::split(line, '\t');
        if (cols.size() != 2) throw parse_error(lineno, "expected 'tok1 tok2<TAB>count'");
        auto words = cmforge::detail::split_ws(cols[0]);
        if (words.size() != 2) throw parse_error(lineno, "bigram must have exactly two tokens");
        store.add_bigram(words[0], words[1], detail::parse_count(cols[1], lineno));
    }
    return store;
}

inline NGramStore load_ngrams(const std::string& uni_path, const std::string& bi_path)
{
    auto u = cmforge::detail::open_input(uni_path);
    auto b = cmforge::detail::open_input(bi_path);
    return parse_ngrams(u, b);
}

enum class DiceVariant {
    /// freq(x,y) / (freq(x) + freq(y))
    as_written,
    /// 2 freq(x,y) / (freq(x) + freq(y))
    classical,
};

inline double dice(const NGramStore& store, const std::string& a, const std::string& b,
                   DiceVariant variant = DiceVariant::as_written)
{
    const auto fa = store.freq(a);
    const auto fb = store.freq(b);
    if (fa == 0 || fb == 0) return 0.0;
    const double joint = static_cast<double>(store.freq(a, b));
    const double r = joint / static_cast<double>(fa + fb);
    return variant == DiceVariant::classical ? 2 * r : r;
}

// ---------------------------------------------------------------------------
// Transliteration

enum class RuleClass {
    /// Emitted as is; closes a pending inherent vowel first.
    plain,
    /// Consonant carrying an inherent vowel until a sign or virama follows.
    consonant,
    /// Dependent vowel sign replacing the inherent vowel.
    sign,
    /// Suppresses the inherent vowel.
    virama,
    /// Applies only when it spans a whole word.
    word,
};

struct TranslitRule {
    std::string source;
    std::string target;
    RuleClass cls = RuleClass::plain;
};

struct TranslitTable {
    std::vector<TranslitRule> rules;
    bool longest_match = true;
    std::string inherent_vowel = "a";
    /// Drop the inherent vowel of a word-final consonant in words of two or
    /// more syllables.
    bool drop_final_schwa = false;
};

inline RuleClass parse_rule_class(std::string_view s, std::size_t lineno)
{
    if (s.empty() || s == "plain") return RuleClass::plain;
    if (s == "consonant") return RuleClass::consonant;
    if (s == "sign") return RuleClass::sign;
    if (s == "virama") return RuleClass::virama;
    if (s == "word") return RuleClass::word;
    throw parse_error(lineno, "unknown rule class '" + std::string(s) + "'");
}

/// Rule file: "src<TAB>tgt[<TAB>class]" lines, '#' comments, and '@' option
/// lines ("@inherent<TAB>a", "@final_schwa<TAB>drop|keep",
/// "@match<TAB>longest|ordered").
inline TranslitTable parse_translit_table(std::istream& in)
{
    TranslitTable tab;
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        if (!unicode::valid_utf8(line)) throw parse_error(lineno, "invalid UTF-8");
        auto cols = cmforge::detail::split(line, '\t');
        if (line[0] == '@') {
            if (cols.size() != 2) throw parse_error(lineno, "option line needs 2 fields");
            if (cols[0] == "@inherent") tab.inherent_vowel = cols[1];
            else if (cols[0] == "@final_schwa") tab.drop_final_schwa = cols[1] == "drop";
            else if (cols[0] == "@match") tab.longest_match = cols[1] != "ordered";
            else throw parse_error(lineno, "unknown option '" + cols[0] + "'");
            continue;
        }
        if (cols.size() != 2 && cols.size() != 3) throw parse_error(lineno, "expected 2 or 3 fields");
        TranslitRule r;
        r.source = unicode::nfc(cols[0]);
        r.target = cols[1];
        r.cls = parse_rule_class(cols.size() == 3 ? cols[2] : "", lineno);
        if (r.source.empty()) throw parse_error(lineno, "empty rule source");
        if (!seen.emplace(r.source, lineno).second)
            throw parse_error(lineno, "duplicate rule for '" + r.source + "'");
        tab.rules.push_back(std::move(r));
    }
    if (tab.rules.empty()) throw input_error("transliteration table has no rules");
    return tab;
}

inline TranslitTable load_translit_table(const std::string& path)
{
    auto in = cmforge::detail::open_input(path);
    return parse_translit_table(in);
}

namespace detail {

inline std::string cps_to_string(const std::vector<UChar32>& cps, std::size_t b, std::size_t e)
{
    std::string s;
    for (std::size_t k = b; k < e; ++k) unicode::append_utf8(s, cps[k]);
    return s;
}

inline std::string transliterate_word(const TranslitTable& tab, const std::vector<UChar32>& cps,
                                      const std::unordered_map<std::string, const TranslitRule*>& index,
                                      std::size_t max_len)
{
    const std::string whole = cps_to_string(cps, 0, cps.size());
    if (auto it = index.find(whole); it != index.end() && it->second->cls == RuleClass::word)
        return it->second->target;

    std::string out;
    bool pending = false;
    std::size_t syllables = 0;
    auto flush = [&]() {
        if (pending) out += tab.inherent_vowel;
        pending = false;
    };

    std::size_t i = 0;
    while (i < cps.size()) {
        const TranslitRule* rule = nullptr;
        std::size_t len = 0;
        if (tab.longest_match) {
            for (std::size_t l = std::min(max_len, cps.size() - i); l > 0 && !rule; --l) {
                auto it = index.find(cps_to_string(cps, i, i + l));
                if (it != index.end() && it->second->cls != RuleClass::word) {
                    rule = it->second;
                    len = l;
                }
            }
        } else {
            for (const auto& r : tab.rules) {
                if (r.cls == RuleClass::word) continue;
                auto rc = unicode::code_points(r.source);
                if (i + rc.size() <= cps.size() && std::equal(rc.begin(), rc.end(), cps.begin() + i)) {
                    rule = &r;
                    len = rc.size();
                    break;
                }
            }
        }
        if (!rule) {
            flush();
            unicode::append_utf8(out, cps[i]);
            ++i;
            continue;
        }
        switch (rule->cls) {
        case RuleClass::consonant:
            if (pending) ++syllables;
            flush();
            out += rule->target;
            pending = true;
            break;
        case RuleClass::sign:
            out += rule->target;
            if (pending) ++syllables;
            pending = false;
            break;
        case RuleClass::virama:
            pending = false;
            out += rule->target;
            break;
        case RuleClass::plain:
        case RuleClass::word:
            if (pending) ++syllables;
            flush();
            out += rule->target;
            if (!rule->target.empty()) ++syllables;
            break;
        }
        i += len;
    }
    if (pending) {
        if (!(tab.drop_final_schwa && syllables >= 1)) out += tab.inherent_vowel;
    }
    return out;
}

}  // namespace detail

/// Greedy left-to-right rule application per whitespace-separated word;
/// characters without a rule pass through unchanged.
inline std::string transliterate(const TranslitTable& tab, std::string_view text)
{
    std::unordered_map<std::string, const TranslitRule*> index;
    std::size_t max_len = 1;
    for (const auto& r : tab.rules) {
        index.emplace(r.source, &r);
        max_len = std::max(max_len, unicode::code_points(r.source).size());
    }

    const auto cps = unicode::code_points(unicode::nfc(text));
    std::string out;
    std::size_t i = 0;
    while (i < cps.size()) {
        if (unicode::is_space(cps[i])) {
            unicode::append_utf8(out, cps[i]);
            ++i;
            continue;
        }
        std::size_t e = i;
        while (e < cps.size() && !unicode::is_space(cps[e])) ++e;
        std::vector<UChar32> word(cps.begin() + static_cast<std::ptrdiff_t>(i),
                                  cps.begin() + static_cast<std::ptrdiff_t>(e));
        out += detail::transliterate_word(tab, word, index, max_len);
        i = e;
    }
    return out;
}

}  // namespace cmforge::lex
