#pragma once

// Question answering over a passage collection: query formulation, passage
// retrieval, candidate extraction and answer ranking.

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmforge/answerrank.hpp"
#include "cmforge/corpus.hpp"
#include "cmforge/retrieval.hpp"

namespace cmforge::pipeline {

struct QaResources {
    retrieval::PassageIndex index;
    std::map<std::string, retrieval::Passage> passages;
    /// Annotated sentences per passage id; passages without an entry are
    /// segmented from their text and carry no entity labels.
    std::map<std::string, std::vector<AnnotatedSentence>> annotations;
    retrieval::StopwordSet stopwords;
    retrieval::IdfTable idf;
    const retrieval::EmbeddingLexicon* embeddings = nullptr;
    std::vector<qa::Pattern> patterns;
    qa::AnswerTypeMap answer_types = qa::default_answer_types();
};

/// Builds the index and the idf table from a passage list.
inline QaResources make_resources(const std::vector<retrieval::Passage>& passages, retrieval::StopwordSet stopwords)
{
    QaResources r;
    r.index = retrieval::build_index(passages, stopwords);
    for (const auto& p : passages) r.passages[p.id] = p;
    r.stopwords = std::move(stopwords);
    r.idf = retrieval::IdfTable::from_index(r.index);
    return r;
}

/// Groups annotated sentences by their "passage_id" metadata; a sentence
/// without it continues the previous passage.
inline std::map<std::string, std::vector<AnnotatedSentence>>
group_by_passage(const std::vector<AnnotatedSentence>& sentences)
{
    std::map<std::string, std::vector<AnnotatedSentence>> out;
    std::string current;
    for (const auto& s : sentences) {
        auto it = s.meta.find("passage_id");
        if (it != s.meta.end()) current = it->second;
        if (current.empty()) throw input_error("annotated sentence without passage_id");
        out[current].push_back(s);
    }
    return out;
}

struct QaOptions {
    std::size_t top_n = 30;
    retrieval::Bm25Params bm25;
    qa::ScoringWeights weights;
    qa::RankOptions rank;
    /// Drop factoid candidates made only of words the question already has.
    bool drop_question_overlap = true;
};

struct QaAnswer {
    std::string question_id;
    bool no_answer = true;
    std::string answer;
    double score = 0;
    qa::Components components;
    std::string passage_id;

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        j["question_id"] = question_id;
        j["answer"] = no_answer ? nlohmann::json(nullptr) : nlohmann::json(answer);
        j["score"] = score;
        nlohmann::json c = nlohmann::json::object();
        for (const auto& [k, v] : components.to_map()) c[k] = v;
        j["components"] = c;
        j["passage_id"] = no_answer ? nlohmann::json(nullptr) : nlohmann::json(passage_id);
        return j;
    }
};

/// Candidate sentences of the retrieved passages in retrieval order.
inline std::vector<qa::CandidateSentence>
candidate_sentences(const QaResources& res, const std::vector<std::pair<std::string, double>>& hits)
{
    std::vector<qa::CandidateSentence> out;
    for (const auto& [pid, score] : hits) {
        auto ann = res.annotations.find(pid);
        if (ann != res.annotations.end()) {
            for (const auto& s : ann->second) out.push_back({s, pid, out.size()});
            continue;
        }
        auto p = res.passages.find(pid);
        if (p == res.passages.end()) continue;
        for (auto& toks : qa::segment_tokens(tokenize(p->second.text, LanguageTag(p->second.language))))
            out.push_back({unannotated(std::move(toks)), pid, out.size()});
    }
    return out;
}

inline QaAnswer answer_question(const QARecord& q, const QaResources& res, const QaOptions& opts = {})
{
    QaAnswer out;
    out.question_id = q.id;
    const auto query = retrieval::formulate_query(q.question, res.stopwords, q.id);
    std::vector<std::string> terms;
    for (const auto& t : query.terms) terms.push_back(unicode::to_lower(t));
    if (terms.empty()) return out;

    const auto hits = retrieval::retrieve_passages(res.index, query, opts.top_n, opts.bm25);
    const auto sentences = candidate_sentences(res, hits);

    std::vector<qa::CandidateAnswer> candidates;
    if (q.qtype == QType::factoid && !q.answer_type) {
        // No expected type: every PER/LOC/ORG entity competes.
        for (const auto& cs : sentences)
            for (const auto& ne : cs.sentence.ne_spans) {
                if (ne.type == NeType::OTHER) continue;
                std::vector<std::string> w;
                for (std::size_t i = ne.span.start; i < ne.span.end; ++i) w.push_back(cs.sentence.tokens[i].surface);
                candidates.push_back({detokenize(w), cs.order, cs.passage_id, ne.type, ne.span, {}, 0});
            }
    } else {
        candidates = qa::extract_candidates(sentences, q.answer_type.value_or(""), q.qtype, res.answer_types);
    }

    if (q.qtype == QType::factoid && opts.drop_question_overlap) {
        std::set<std::string> qwords;
        for (const auto& t : q.question.tokens) qwords.insert(unicode::to_lower(t.surface));
        std::erase_if(candidates, [&](const qa::CandidateAnswer& c) {
            for (const auto& w : cmforge::detail::split_ws(c.text))
                if (!unicode::all_punct(w) && !qwords.count(unicode::to_lower(w))) return false;
            return true;
        });
    }

    qa::ScoringContext ctx{&res.idf, res.embeddings, &res.patterns, &res.stopwords};
    std::map<std::size_t, qa::Components> cache;
    for (auto& c : candidates) {
        auto it = cache.find(c.sentence_id);
        if (it == cache.end())
            it = cache.emplace(c.sentence_id, qa::score_components(surfaces(sentences[c.sentence_id].sentence.tokens),
                                                                   terms, q.qtype, ctx))
                     .first;
        c.components = it->second;
    }

    auto ranked = qa::rank_answers(std::move(candidates), opts.weights, q.qtype, opts.rank);
    if (ranked.no_answer) return out;
    out.no_answer = false;
    out.answer = ranked.answer;
    out.score = ranked.score;
    out.components = ranked.ordered.front().components;
    out.passage_id = ranked.ordered.front().passage_id;
    return out;
}

}  // namespace cmforge::pipeline
