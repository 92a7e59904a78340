#pragma once

// Code-mixing complexity (CMI, SPF) and evaluation metrics: BLEU, ROUGE-L,
// METEOR with exact matching only, SQuAD-style EM/F1, and ranking metrics.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmforge/corpus.hpp"
#include "cmforge/mixer.hpp"

namespace cmforge::metrics {

/// Neumaier compensated summation.
class Accumulator {
public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
        ++n_;
    }

    double sum() const noexcept { return sum_ + comp_; }
    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return n_ ? sum() / static_cast<double>(n_) : 0.0; }

private:
    double sum_ = 0, comp_ = 0;
    std::size_t n_ = 0;
};

struct MetricReport {
    std::string name;
    double corpus_value = 0;
    std::vector<std::pair<std::string, double>> per_item;
    std::map<std::string, double> params;

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["name"] = name;
        j["corpus_value"] = corpus_value;
        j["params"] = params;
        j["per_item"] = nlohmann::json::array();
        for (const auto& [id, v] : per_item) j["per_item"].push_back({{"id", id}, {"value", v}});
        return j;
    }
};

// ---------------------------------------------------------------------------
// Code-mixing complexity

struct CmiOptions {
    /// Classical correction: language-independent tokens leave the
    /// denominator, CMI = 100 (1 - max / (N - u)).
    bool exclude_other = false;
};

/// Code-Mixing Index ×100. Tokens tagged "other" count towards N but never
/// towards a language's share.
inline double cmi(const mix::TaggedSentence& x, const CmiOptions& opts = {})
{
    if (x.tokens.empty()) throw input_error("CMI of an empty sentence");
    std::map<std::string, std::size_t> counts;
    std::size_t other = 0;
    for (const auto& t : x.tokens) {
        if (t.lang.is_other()) ++other;
        else ++counts[t.lang.code()];
    }
    std::size_t top = 0;
    for (const auto& [lang, c] : counts) top = std::max(top, c);
    const double n = static_cast<double>(x.tokens.size());
    if (opts.exclude_other) {
        const double u = static_cast<double>(other);
        if (n - u <= 0) return 0.0;
        return 100.0 * (1.0 - static_cast<double>(top) / (n - u));
    }
    return 100.0 * (n - static_cast<double>(top)) / n;
}

/// Switch points over boundaries between consecutive non-"other" tokens;
/// 0 with fewer than two such tokens.
inline double spf(const mix::TaggedSentence& x)
{
    std::vector<const LanguageTag*> langs;
    for (const auto& t : x.tokens)
        if (!t.lang.is_other()) langs.push_back(&t.lang);
    if (langs.size() < 2) return 0.0;
    std::size_t switches = 0;
    for (std::size_t i = 1; i < langs.size(); ++i)
        if (*langs[i] != *langs[i - 1]) ++switches;
    return static_cast<double>(switches) / static_cast<double>(langs.size() - 1);
}

inline MetricReport corpus_cmi(const std::vector<mix::TaggedSentence>& xs, const CmiOptions& opts = {})
{
    MetricReport r{"cmi", 0, {}, {{"exclude_other", opts.exclude_other ? 1.0 : 0.0}}};
    Accumulator acc;
    for (const auto& x : xs) {
        double v = cmi(x, opts);
        r.per_item.emplace_back(x.id, v);
        acc.add(v);
    }
    r.corpus_value = acc.mean();
    return r;
}

inline MetricReport corpus_spf(const std::vector<mix::TaggedSentence>& xs)
{
    MetricReport r{"spf", 0, {}, {}};
    Accumulator acc;
    for (const auto& x : xs) {
        double v = spf(x);
        r.per_item.emplace_back(x.id, v);
        acc.add(v);
    }
    r.corpus_value = acc.mean();
    return r;
}

// ---------------------------------------------------------------------------
// BLEU

using Words = std::vector<std::string>;

struct BleuOptions {
    int max_n = 4;
    /// Add-one smoothing of the n > 1 precisions.
    bool smoothing = false;
};

namespace detail {

inline std::map<Words, std::size_t> ngram_counts(const Words& w, std::size_t n)
{
    std::map<Words, std::size_t> out;
    if (w.size() < n) return out;
    for (std::size_t i = 0; i + n <= w.size(); ++i) ++out[Words(w.begin() + i, w.begin() + i + n)];
    return out;
}

}  // namespace detail

/// Corpus BLEU with clipped n-gram precisions and uniform weights. Each
/// candidate may have several references.
inline double bleu(const std::vector<Words>& candidates, const std::vector<std::vector<Words>>& references,
                   const BleuOptions& opts = {})
{
    if (candidates.empty()) throw input_error("BLEU of an empty corpus");
    if (candidates.size() != references.size()) throw input_error("candidate and reference counts differ");
    if (opts.max_n < 1) throw input_error("BLEU order must be >= 1");

    const auto N = static_cast<std::size_t>(opts.max_n);
    std::vector<double> matched(N, 0), total(N, 0);
    double c = 0, r = 0;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const auto& cand = candidates[k];
        const auto& refs = references[k];
        if (refs.empty()) throw input_error("candidate without reference");
        c += static_cast<double>(cand.size());
        // Closest reference length, shorter one on ties.
        std::size_t best = refs.front().size();
        for (const auto& ref : refs) {
            auto d = [&](std::size_t len) {
                return len > cand.size() ? len - cand.size() : cand.size() - len;
            };
            if (d(ref.size()) < d(best) || (d(ref.size()) == d(best) && ref.size() < best)) best = ref.size();
        }
        r += static_cast<double>(best);
        for (std::size_t n = 1; n <= N; ++n) {
            auto cc = detail::ngram_counts(cand, n);
            std::map<Words, std::size_t> max_ref;
            for (const auto& ref : refs)
                for (const auto& [g, cnt] : detail::ngram_counts(ref, n)) max_ref[g] = std::max(max_ref[g], cnt);
            for (const auto& [g, cnt] : cc) {
                auto it = max_ref.find(g);
                matched[n - 1] += static_cast<double>(std::min(cnt, it == max_ref.end() ? 0 : it->second));
                total[n - 1] += static_cast<double>(cnt);
            }
        }
    }
    if (c == 0) return 0.0;
    // Orders longer than every candidate have no n-grams at all; they are
    // left out and the remaining orders share the weight.
    std::size_t orders = 0;
    while (orders < N && total[orders] > 0) ++orders;
    double log_sum = 0;
    for (std::size_t n = 0; n < orders; ++n) {
        double num = matched[n], den = total[n];
        if (opts.smoothing && n > 0) {
            num += 1;
            den += 1;
        }
        if (num == 0) return 0.0;
        log_sum += std::log(num / den) / static_cast<double>(orders);
    }
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum);
}

inline double bleu(const std::vector<Words>& candidates, const std::vector<Words>& references,
                   const BleuOptions& opts = {})
{
    std::vector<std::vector<Words>> refs;
    refs.reserve(references.size());
    for (const auto& r : references) refs.push_back({r});
    return bleu(candidates, refs, opts);
}

// ---------------------------------------------------------------------------
// ROUGE-L and METEOR

struct PRF {
    double precision = 0, recall = 0, f = 0;
};

inline std::size_t lcs_length(const Words& a, const Words& b)
{
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

/// LCS precision, recall and F (beta = 1).
inline PRF rouge_l(const Words& candidate, const Words& reference)
{
    if (reference.empty()) throw input_error("ROUGE-L needs a non-empty reference");
    if (candidate.empty()) return {};
    const double l = static_cast<double>(lcs_length(candidate, reference));
    PRF out;
    out.precision = l / static_cast<double>(candidate.size());
    out.recall = l / static_cast<double>(reference.size());
    out.f = l == 0 ? 0 : 2 * out.precision * out.recall / (out.precision + out.recall);
    return out;
}

struct MeteorOptions {
    double gamma = 0.5;
    double beta = 3.0;
};

/// METEOR restricted to exact unigram matches. Each candidate word maps to
/// the first unused identical reference word.
inline double meteor_lite(const Words& candidate, const Words& reference, const MeteorOptions& opts = {})
{
    if (reference.empty()) throw input_error("METEOR needs a non-empty reference");
    std::vector<bool> used(reference.size(), false);
    std::vector<std::pair<std::size_t, std::size_t>> align;  // (cand, ref)
    for (std::size_t i = 0; i < candidate.size(); ++i)
        for (std::size_t j = 0; j < reference.size(); ++j)
            if (!used[j] && candidate[i] == reference[j]) {
                used[j] = true;
                align.emplace_back(i, j);
                break;
            }
    const double m = static_cast<double>(align.size());
    if (m == 0) return 0.0;
    std::size_t chunks = 1;
    for (std::size_t k = 1; k < align.size(); ++k)
        if (align[k].first != align[k - 1].first + 1 || align[k].second != align[k - 1].second + 1) ++chunks;
    const double p = m / static_cast<double>(candidate.size());
    const double r = m / static_cast<double>(reference.size());
    const double fmean = 10 * p * r / (9 * p + r);
    const double penalty = opts.gamma * std::pow(static_cast<double>(chunks) / m, opts.beta);
    return fmean * (1 - penalty);
}

// ---------------------------------------------------------------------------
// Span QA metrics

/// Lowercase, strip punctuation and the articles a/an/the, collapse spaces.
inline Words normalize_answer(const std::string& s)
{
    std::string lowered = unicode::to_lower(unicode::nfc(s));
    std::string cleaned;
    for (UChar32 c : unicode::code_points(lowered)) {
        if (unicode::is_punct(c)) continue;
        if (unicode::is_space(c)) cleaned.push_back(' ');
        else unicode::append_utf8(cleaned, c);
    }
    Words out;
    for (auto& w : cmforge::detail::split_ws(cleaned))
        if (w != "a" && w != "an" && w != "the") out.push_back(std::move(w));
    return out;
}

inline bool exact_match(const std::string& prediction, const std::string& gold)
{
    return normalize_answer(prediction) == normalize_answer(gold);
}

/// Bag-of-tokens F1 between normalized answers.
inline double token_f1(const std::string& prediction, const std::string& gold)
{
    auto p = normalize_answer(prediction);
    auto g = normalize_answer(gold);
    if (p.empty() || g.empty()) return p.empty() && g.empty() ? 1.0 : 0.0;
    std::map<std::string, int> cp, cg;
    for (const auto& w : p) ++cp[w];
    for (const auto& w : g) ++cg[w];
    double common = 0;
    for (const auto& [w, c] : cp) {
        auto it = cg.find(w);
        if (it != cg.end()) common += std::min(c, it->second);
    }
    if (common == 0) return 0.0;
    double prec = common / static_cast<double>(p.size());
    double rec = common / static_cast<double>(g.size());
    return 2 * prec * rec / (prec + rec);
}

struct SpanScores {
    double em = 0;  // ×100
    double f1 = 0;  // ×100
    std::vector<std::pair<std::string, std::pair<double, double>>> per_item;
};

/// Means over gold ids (×100); a gold id without a prediction scores 0.
inline SpanScores qa_span_metrics(const std::map<std::string, std::string>& predictions,
                                  const std::map<std::string, std::vector<std::string>>& golds)
{
    SpanScores out;
    Accumulator em, f1;
    for (const auto& [id, answers] : golds) {
        double e = 0, f = 0;
        auto it = predictions.find(id);
        if (it != predictions.end()) {
            for (const auto& g : answers) {
                e = std::max(e, exact_match(it->second, g) ? 1.0 : 0.0);
                f = std::max(f, token_f1(it->second, g));
            }
        }
        em.add(e);
        f1.add(f);
        out.per_item.push_back({id, {100 * e, 100 * f}});
    }
    out.em = 100 * em.mean();
    out.f1 = 100 * f1.mean();
    return out;
}

// ---------------------------------------------------------------------------
// Ranking metrics

struct RankedList {
    std::string query_id;
    std::vector<std::pair<std::string, double>> items;  // scores non-increasing
    std::set<std::string> relevant;
};

struct RankScores {
    double precision_at_k = 0;
    double recall_at_k = 0;
    double map = 0;
    double mrr = 0;
    std::size_t queries = 0;  // queries with a non-empty relevant set
};

inline double average_precision(const RankedList& l)
{
    if (l.relevant.empty()) return 0.0;
    double hits = 0, sum = 0;
    for (std::size_t r = 0; r < l.items.size(); ++r) {
        if (l.relevant.count(l.items[r].first)) {
            hits += 1;
            sum += hits / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(l.relevant.size());
}

inline double reciprocal_rank(const RankedList& l)
{
    for (std::size_t r = 0; r < l.items.size(); ++r)
        if (l.relevant.count(l.items[r].first)) return 1.0 / static_cast<double>(r + 1);
    return 0.0;
}

/// P@k, R@k, MAP and MRR averaged over queries with relevant items.
inline RankScores rank_metrics(const std::vector<RankedList>& lists, std::size_t k)
{
    if (k == 0) throw input_error("k must be >= 1");
    Accumulator p, r, ap, rr;
    for (const auto& l : lists) {
        if (l.relevant.empty()) continue;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < std::min(k, l.items.size()); ++i)
            if (l.relevant.count(l.items[i].first)) ++hits;
        p.add(static_cast<double>(hits) / static_cast<double>(k));
        r.add(static_cast<double>(hits) / static_cast<double>(l.relevant.size()));
        ap.add(average_precision(l));
        rr.add(reciprocal_rank(l));
    }
    return {p.mean(), r.mean(), ap.mean(), rr.mean(), p.count()};
}

}  // namespace cmforge::metrics
