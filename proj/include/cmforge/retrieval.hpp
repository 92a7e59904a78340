#pragma once

// Passage retrieval: inverted index with Boolean-OR filtering and BM25
// ranking, PoS-driven query formulation, and question-biased LexRank over
// sentences for snippet generation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmforge/corpus.hpp"
#include "cmforge/error.hpp"

namespace cmforge::retrieval {

// ---------------------------------------------------------------------------
// Stopwords and term normalization

class StopwordSet {
public:
    StopwordSet() = default;
    StopwordSet(std::initializer_list<std::string> words)
    {
        for (const auto& w : words) add(w);
    }

    void add(const std::string& w) { words_.insert(unicode::to_lower(unicode::nfc(w))); }
    bool contains(const std::string& w) const { return words_.count(unicode::to_lower(w)) != 0; }
    std::size_t size() const noexcept { return words_.size(); }

    std::vector<std::string> sorted() const
    {
        std::vector<std::string> out(words_.begin(), words_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::unordered_set<std::string> words_;
};

/// One word per line; '#' starts a comment line.
inline void load_stopwords_into(StopwordSet& set, const std::string& path)
{
    auto in = cmforge::detail::open_input(path);
    std::string line;
    while (std::getline(in, line)) {
        cmforge::detail::strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        for (const auto& w : cmforge::detail::split_ws(line)) set.add(w);
    }
}

inline StopwordSet load_stopwords(const std::vector<std::string>& paths)
{
    StopwordSet set;
    for (const auto& p : paths) load_stopwords_into(set, p);
    return set;
}

/// Lowercased content terms: punctuation-only tokens and stopwords dropped.
inline std::vector<std::string> content_terms(const std::vector<std::string>& words, const StopwordSet& stop)
{
    std::vector<std::string> out;
    for (const auto& w : words) {
        if (unicode::all_punct(w)) continue;
        auto lw = unicode::to_lower(w);
        if (stop.contains(lw)) continue;
        out.push_back(std::move(lw));
    }
    return out;
}

inline std::vector<std::string> content_terms(std::string_view text, const StopwordSet& stop)
{
    return content_terms(surfaces(tokenize(text, LanguageTag::other())), stop);
}

// ---------------------------------------------------------------------------
// Passages and the inverted index

struct Passage {
    std::string id;
    std::string article_id;
    std::string text;
    std::string language = "en";
};

inline std::vector<Passage> load_passages(const std::string& path)
{
    std::vector<Passage> out;
    std::size_t k = 0;
    for (const auto& j : load_jsonl(path)) {
        ++k;
        try {
            Passage p;
            p.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
            if (j.contains("article_id"))
                p.article_id = j["article_id"].is_string() ? j["article_id"].get<std::string>() : j["article_id"].dump();
            p.text = unicode::nfc(j.at("text").get<std::string>());
            p.language = j.value("language", std::string("en"));
            out.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw input_error("passage " + std::to_string(k) + ": " + e.what());
        }
    }
    return out;
}

struct Posting {
    std::uint32_t doc = 0;  // index into the sorted passage-id list
    std::uint32_t tf = 0;

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Passage-level inverted index. Documents are numbered in passage-id order,
/// so posting lists sorted by document number are sorted by passage id.
class PassageIndex {
public:
    std::size_t num_docs() const noexcept { return ids_.size(); }
    double avg_len() const noexcept { return avg_len_; }
    const std::vector<std::string>& passage_ids() const noexcept { return ids_; }
    const StopwordSet& stopwords() const noexcept { return stop_; }
    const std::map<std::string, std::vector<Posting>>& postings() const noexcept { return postings_; }

    std::size_t doc_len(std::size_t doc) const { return doc_len_.at(doc); }

    std::optional<std::size_t> doc_of(const std::string& passage_id) const
    {
        auto it = std::lower_bound(ids_.begin(), ids_.end(), passage_id);
        if (it == ids_.end() || *it != passage_id) return std::nullopt;
        return static_cast<std::size_t>(it - ids_.begin());
    }

    std::size_t df(const std::string& term) const
    {
        auto it = postings_.find(term);
        return it == postings_.end() ? 0 : it->second.size();
    }

    const std::vector<Posting>* find(const std::string& term) const
    {
        auto it = postings_.find(term);
        return it == postings_.end() ? nullptr : &it->second;
    }

    /// ln((N - df + 0.5) / (df + 0.5) + 1)
    double bm25_idf(const std::string& term) const
    {
        const double n = static_cast<double>(num_docs());
        const double d = static_cast<double>(df(term));
        return std::log((n - d + 0.5) / (d + 0.5) + 1.0);
    }

    /// Binary layout (little endian): magic "CMFX", version byte, stopwords,
    /// documents (id, length), then the term dictionary with postings.
    void save(std::ostream& out) const
    {
        out.write("CMFX", 4);
        out.put(static_cast<char>(kVersion));
        auto words = stop_.sorted();
        put_u32(out, static_cast<std::uint32_t>(words.size()));
        for (const auto& w : words) put_str(out, w);
        put_u32(out, static_cast<std::uint32_t>(ids_.size()));
        for (std::size_t d = 0; d < ids_.size(); ++d) {
            put_str(out, ids_[d]);
            put_u32(out, static_cast<std::uint32_t>(doc_len_[d]));
        }
        put_u32(out, static_cast<std::uint32_t>(postings_.size()));
        for (const auto& [term, list] : postings_) {
            put_str(out, term);
            put_u32(out, static_cast<std::uint32_t>(list.size()));
            for (const auto& p : list) {
                put_u32(out, p.doc);
                put_u32(out, p.tf);
            }
        }
    }

    static PassageIndex load(std::istream& in)
    {
        char magic[4];
        if (!in.read(magic, 4) || std::memcmp(magic, "CMFX", 4) != 0) throw input_error("not a cmforge index");
        int version = in.get();
        if (version != kVersion) throw input_error("unsupported index version " + std::to_string(version));
        PassageIndex idx;
        auto nstop = get_u32(in);
        for (std::uint32_t k = 0; k < nstop; ++k) idx.stop_.add(get_str(in));
        auto ndocs = get_u32(in);
        for (std::uint32_t d = 0; d < ndocs; ++d) {
            idx.ids_.push_back(get_str(in));
            idx.doc_len_.push_back(get_u32(in));
        }
        auto nterms = get_u32(in);
        for (std::uint32_t k = 0; k < nterms; ++k) {
            auto term = get_str(in);
            auto n = get_u32(in);
            std::vector<Posting> list(n);
            for (auto& p : list) {
                p.doc = get_u32(in);
                p.tf = get_u32(in);
                if (p.doc >= ndocs) throw input_error("corrupt index: posting out of range");
            }
            idx.postings_.emplace(std::move(term), std::move(list));
        }
        idx.finish();
        return idx;
    }

private:
    friend PassageIndex build_index(const std::vector<Passage>&, const StopwordSet&);
    static constexpr int kVersion = 1;

    void finish()
    {
        double total = 0;
        for (auto l : doc_len_) total += static_cast<double>(l);
        avg_len_ = ids_.empty() ? 0.0 : total / static_cast<double>(ids_.size());
    }

    static void put_u32(std::ostream& out, std::uint32_t v)
    {
        unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
        out.write(reinterpret_cast<const char*>(b), 4);
    }

    static std::uint32_t get_u32(std::istream& in)
    {
        unsigned char b[4];
        if (!in.read(reinterpret_cast<char*>(b), 4)) throw input_error("truncated index");
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    static void put_str(std::ostream& out, const std::string& s)
    {
        put_u32(out, static_cast<std::uint32_t>(s.size()));
        out.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    static std::string get_str(std::istream& in)
    {
        auto n = get_u32(in);
        std::string s(n, '\0');
        if (n && !in.read(s.data(), n)) throw input_error("truncated index");
        return s;
    }

    std::vector<std::string> ids_;
    std::vector<std::size_t> doc_len_;
    std::map<std::string, std::vector<Posting>> postings_;
    StopwordSet stop_;
    double avg_len_ = 0;
};

/// Indexes lowercased content terms of each passage. Document length is the
/// number of indexed terms.
inline PassageIndex build_index(const std::vector<Passage>& passages, const StopwordSet& stopwords)
{
    PassageIndex idx;
    idx.stop_ = stopwords;
    std::vector<const Passage*> sorted;
    for (const auto& p : passages) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [](const Passage* a, const Passage* b) { return a->id < b->id; });
    for (std::size_t k = 1; k < sorted.size(); ++k)
        if (sorted[k]->id == sorted[k - 1]->id) throw input_error("duplicate passage id '" + sorted[k]->id + "'");

    for (std::size_t d = 0; d < sorted.size(); ++d) {
        idx.ids_.push_back(sorted[d]->id);
        auto terms = content_terms(sorted[d]->text, stopwords);
        idx.doc_len_.push_back(terms.size());
        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : terms) ++tf[t];
        for (const auto& [t, f] : tf) idx.postings_[t].push_back({static_cast<std::uint32_t>(d), f});
    }
    idx.finish();
    return idx;
}

// ---------------------------------------------------------------------------
// Query formulation and passage retrieval

struct Query {
    std::vector<std::string> terms;
    std::string source_question_id;
};

inline bool content_pos(const std::string& tag)
{
    auto starts = [&](const char* p) { return tag.rfind(p, 0) == 0; };
    return starts("NN") || starts("VB") || starts("JJ") || tag == "NST" || tag == "VM" || tag == "NOUN" ||
           tag == "PROPN" || tag == "VERB" || tag == "ADJ";
}

/// Noun, verb and adjective tokens in question order with stopwords and
/// punctuation removed. Without PoS tags every content token is kept.
inline Query formulate_query(const AnnotatedSentence& q, const StopwordSet& stopwords, std::string id = {})
{
    Query out;
    out.source_question_id = std::move(id);
    const bool tagged = !q.pos.empty() &&
                        std::any_of(q.pos.begin(), q.pos.end(), [](const std::string& t) { return t != "_"; });
    for (std::size_t i = 0; i < q.size(); ++i) {
        const auto& w = q.tokens[i].surface;
        if (unicode::all_punct(w) || stopwords.contains(w)) continue;
        if (tagged && !content_pos(q.pos[i])) continue;
        out.terms.push_back(w);
    }
    return out;
}

/// Passages containing at least one query term ranked by BM25, ties by
/// passage id, at most `top_n`.
inline std::vector<std::pair<std::string, double>> retrieve_passages(const PassageIndex& index, const Query& query,
                                                                     std::size_t top_n = 30,
                                                                     const Bm25Params& params = {})
{
    std::vector<std::pair<std::string, double>> out;
    if (query.terms.empty() || index.num_docs() == 0 || top_n == 0) return out;

    std::set<std::string> terms;
    for (const auto& t : query.terms) {
        auto lt = unicode::to_lower(t);
        if (!index.stopwords().contains(lt) && !unicode::all_punct(lt)) terms.insert(lt);
    }
    std::map<std::uint32_t, double> acc;
    for (const auto& term : terms) {
        const auto* list = index.find(term);
        if (!list) continue;
        const double idf = index.bm25_idf(term);
        for (const auto& p : *list) {
            const double tf = p.tf;
            const double norm = 1 - params.b + params.b * static_cast<double>(index.doc_len(p.doc)) / index.avg_len();
            acc[p.doc] += idf * tf * (params.k1 + 1) / (tf + params.k1 * norm);
        }
    }
    std::vector<std::pair<std::uint32_t, double>> ranked(acc.begin(), acc.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > top_n) ranked.resize(top_n);
    for (const auto& [doc, score] : ranked) out.emplace_back(index.passage_ids()[doc], score);
    return out;
}

// ---------------------------------------------------------------------------
// Relevance and snippet ranking

/// Document frequencies over a collection of term bags.
class IdfTable {
public:
    IdfTable() = default;

    template <typename Range>
    static IdfTable from_documents(const Range& docs)
    {
        IdfTable t;
        for (const auto& d : docs) {
            std::set<std::string> uniq(d.begin(), d.end());
            for (const auto& w : uniq) ++t.df_[w];
            ++t.n_;
        }
        return t;
    }

    static IdfTable from_index(const PassageIndex& idx)
    {
        IdfTable t;
        t.n_ = idx.num_docs();
        for (const auto& [term, list] : idx.postings()) t.df_[term] = list.size();
        return t;
    }

    /// ln(1 + N/df); an unseen term gets ln(N + 1).
    double idf(const std::string& w) const
    {
        auto it = df_.find(w);
        const double n = static_cast<double>(n_);
        if (it == df_.end() || it->second == 0) return std::log(n + 1);
        return std::log(1 + n / static_cast<double>(it->second));
    }

    std::size_t num_docs() const noexcept { return n_; }

private:
    std::unordered_map<std::string, std::size_t> df_;
    std::size_t n_ = 0;
};

class EmbeddingLexicon {
public:
    explicit EmbeddingLexicon(std::size_t dim = 0) : dim_(dim) {}

    void add(const std::string& word, std::vector<double> v)
    {
        if (dim_ == 0) dim_ = v.size();
        if (v.size() != dim_) throw input_error("embedding for '" + word + "' has wrong dimension");
        vectors_[word] = std::move(v);
    }

    const std::vector<double>* find(const std::string& w) const
    {
        auto it = vectors_.find(w);
        return it == vectors_.end() ? nullptr : &it->second;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vectors_.size(); }

private:
    std::size_t dim_;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Text vectors: a "count dim" header, then "word v1 ... vD" per line.
inline EmbeddingLexicon load_embeddings(const std::string& path)
{
    auto in = cmforge::detail::open_input(path);
    std::string line;
    std::size_t lineno = 0;
    EmbeddingLexicon lex;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        ++lineno;
        cmforge::detail::strip_cr(line);
        if (cmforge::detail::blank(line)) continue;
        auto f = cmforge::detail::split_ws(line);
        try {
            if (lineno == 1) {
                if (f.size() != 2) throw parse_error(lineno, "expected header 'count dim'");
                expected = std::stoul(f[0]);
                lex = EmbeddingLexicon(std::stoul(f[1]));
                continue;
            }
            if (f.size() != lex.dim() + 1) throw parse_error(lineno, "expected " + std::to_string(lex.dim()) + " values");
            std::vector<double> v;
            for (std::size_t k = 1; k < f.size(); ++k) v.push_back(std::stod(f[k]));
            lex.add(unicode::to_lower(unicode::nfc(f[0])), std::move(v));
        } catch (const input_error&) {
            throw;
        } catch (const std::exception&) {
            throw parse_error(lineno, "bad number");
        }
    }
    if (expected && lex.size() != expected)
        throw input_error("embedding file declares " + std::to_string(expected) + " vectors, has " +
                          std::to_string(lex.size()));
    return lex;
}

namespace detail {

using SparseVec = std::map<std::string, double>;

inline std::map<std::string, int> term_freqs(const std::vector<std::string>& words)
{
    std::map<std::string, int> tf;
    for (const auto& w : words) ++tf[w];
    return tf;
}

inline double cosine(const SparseVec& a, const SparseVec& b)
{
    double dot = 0, na = 0, nb = 0;
    for (const auto& [k, v] : a) {
        na += v * v;
        auto it = b.find(k);
        if (it != b.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : b) nb += v * v;
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b)
{
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

inline void normalize(std::vector<double>& v)
{
    double n = 0;
    for (double x : v) n += x * x;
    if (n == 0) return;
    n = std::sqrt(n);
    for (double& x : v) x /= n;
}

}  // namespace detail

/// Cosine of the log-tf · idf weighted sums of word vectors; with no
/// embeddings every word is its own one-hot dimension (plain tf-idf).
inline double relevance(const std::vector<std::string>& x, const std::vector<std::string>& y, const IdfTable& idf,
                        const EmbeddingLexicon* emb = nullptr)
{
    auto tfx = detail::term_freqs(x);
    auto tfy = detail::term_freqs(y);
    if (!emb) {
        detail::SparseVec vx, vy;
        for (const auto& [w, f] : tfx) vx[w] = std::log(1.0 + f) * idf.idf(w);
        for (const auto& [w, f] : tfy) vy[w] = std::log(1.0 + f) * idf.idf(w);
        return detail::cosine(vx, vy);
    }
    auto embed = [&](const std::map<std::string, int>& tf) {
        std::vector<double> v(emb->dim(), 0.0);
        for (const auto& [w, f] : tf) {
            const auto* e = emb->find(w);
            if (!e) continue;
            const double weight = std::log(1.0 + f) * idf.idf(w);
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += weight * (*e)[k];
        }
        detail::normalize(v);
        return v;
    };
    return detail::cosine(embed(tfx), embed(tfy));
}

struct SnippetOptions {
    /// Question bias.
    double d = 0.8;
    double tol = 1e-8;
    int max_iters = 200;
    std::size_t top_k = 3;
};

struct SnippetRank {
    std::vector<double> scores;  // p(s|q) per sentence
    std::vector<std::size_t> top;
    double d = 0.8;
    int iterations = 0;
};

/// Transition structure of the question-biased walk: `bias[s]` is the
/// normalized question relevance and `transition[v][s]` the probability of
/// moving from v to s (no self loops). Zero rows become uniform.
struct SnippetChain {
    std::vector<double> bias;
    std::vector<std::vector<double>> transition;
};

inline SnippetChain build_snippet_chain(const std::vector<std::string>& question,
                                        const std::vector<std::vector<std::string>>& sentences, const IdfTable& idf,
                                        const EmbeddingLexicon* emb = nullptr)
{
    const std::size_t n = sentences.size();
    SnippetChain c;
    c.bias.assign(n, 0.0);
    double total = 0;
    for (std::size_t s = 0; s < n; ++s) {
        c.bias[s] = std::max(0.0, relevance(sentences[s], question, idf, emb));
        total += c.bias[s];
    }
    for (auto& b : c.bias) b = total > 0 ? b / total : 1.0 / static_cast<double>(n);

    c.transition.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t v = 0; v < n; ++v) {
        double row = 0;
        for (std::size_t s = 0; s < n; ++s) {
            if (s == v) continue;
            c.transition[v][s] = std::max(0.0, relevance(sentences[s], sentences[v], idf, emb));
            row += c.transition[v][s];
        }
        for (std::size_t s = 0; s < n; ++s) {
            if (s == v) continue;
            c.transition[v][s] = row > 0 ? c.transition[v][s] / row : 1.0 / static_cast<double>(n - 1);
        }
    }
    return c;
}

/// Power iteration of p <- d·bias + (1-d)·Tᵀp from the uniform vector.
inline SnippetRank snippet_rank(const std::vector<std::string>& question,
                                const std::vector<std::vector<std::string>>& sentences, const IdfTable& idf,
                                const SnippetOptions& opts = {}, const EmbeddingLexicon* emb = nullptr)
{
    if (sentences.empty()) throw input_error("snippet ranking needs at least one sentence");
    if (!(opts.d >= 0 && opts.d <= 1)) throw input_error("question bias d must be in [0,1]");
    const std::size_t n = sentences.size();
    SnippetRank out;
    out.d = opts.d;
    if (n == 1) {
        out.scores = {1.0};
        out.top = {0};
        return out;
    }
    const auto chain = build_snippet_chain(question, sentences, idf, emb);
    std::vector<double> p(n, 1.0 / static_cast<double>(n)), next(n);
    while (out.iterations < opts.max_iters) {
        for (std::size_t s = 0; s < n; ++s) {
            double walk = 0;
            for (std::size_t v = 0; v < n; ++v) walk += chain.transition[v][s] * p[v];
            next[s] = opts.d * chain.bias[s] + (1 - opts.d) * walk;
        }
        double z = 0;
        for (double x : next) z += x;
        double change = 0;
        for (std::size_t s = 0; s < n; ++s) {
            next[s] /= z;
            change += std::abs(next[s] - p[s]);
        }
        p.swap(next);
        ++out.iterations;
        if (change < opts.tol) break;
    }
    out.scores = p;
    std::vector<std::size_t> order(n);
    for (std::size_t s = 0; s < n; ++s) order[s] = s;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] > p[b]; });
    order.resize(std::min(opts.top_k, n));
    out.top = std::move(order);
    return out;
}

/// Convenience overload over raw text: terms are lowercased content words and
/// idf comes from the sentence set itself.
inline SnippetRank snippet_rank(std::string_view question, const std::vector<std::string>& sentences,
                                const StopwordSet& stop, const SnippetOptions& opts = {},
                                const EmbeddingLexicon* emb = nullptr)
{
    std::vector<std::vector<std::string>> terms;
    for (const auto& s : sentences) terms.push_back(content_terms(s, stop));
    auto idf = IdfTable::from_documents(terms);
    return snippet_rank(content_terms(question, stop), terms, idf, opts, emb);
}

}  // namespace cmforge::retrieval
