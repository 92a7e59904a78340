// cmforge command-line front end.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cmforge/cmforge.hpp"

using namespace cmforge;
using nlohmann::json;

namespace {

std::string data_dir()
{
    if (const char* d = std::getenv("CMFORGE_DATA")) return d;
    return CMFORGE_DATA_DIR;
}

std::string data_file(const std::string& rel) { return data_dir() + "/" + rel; }

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    for (auto& part : cmforge::detail::split(s, ','))
        if (!part.empty()) out.push_back(part);
    return out;
}

template <std::size_t N>
std::array<double, N> parse_weights(const std::string& s, const char* what)
{
    auto parts = split_list(s);
    if (parts.size() != N) throw input_error(std::string(what) + " needs " + std::to_string(N) + " weights");
    std::array<double, N> w{};
    for (std::size_t i = 0; i < N; ++i) {
        try {
            w[i] = std::stod(parts[i]);
        } catch (const std::exception&) {
            throw input_error(std::string(what) + ": bad weight '" + parts[i] + "'");
        }
    }
    return w;
}

std::string to_text(const std::string& s) { return s; }
std::string to_text(bool b) { return b ? "true" : "false"; }
template <typename T>
std::string to_text(const T& v)
{
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw input_error("config key '" + key + "': expected a boolean, got '" + v + "'");
}

/// A subcommand whose options take their defaults from the config file and
/// can be overridden on the command line.
class Command {
public:
    Command(CLI::App& parent, const std::string& name, const std::string& desc, const RunConfig& file)
        : name_(name), app_(parent.add_subcommand(name, desc)), file_(file)
    {
    }

    template <typename T>
    CLI::Option* option(const std::string& key, T& var, const std::string& desc, bool required = false)
    {
        if (auto v = file_.get(key)) {
            if (!CLI::detail::lexical_cast(*v, var))
                throw input_error("config key '" + key + "': cannot parse '" + *v + "'");
        }
        auto* o = app_->add_option("--" + key, var, desc)->capture_default_str();
        if (required && !file_.has(key)) o->required();
        values_.emplace_back(key, [&var] { return to_text(var); });
        return o;
    }

    CLI::Option* flag(const std::string& key, bool& var, const std::string& desc)
    {
        if (auto v = file_.get(key)) var = parse_bool(key, *v);
        auto* o = app_->add_flag("--" + key + ",!--no-" + key, var, desc)->capture_default_str();
        values_.emplace_back(key, [&var] { return to_text(var); });
        return o;
    }

    RunConfig resolved() const
    {
        RunConfig c;
        for (const auto& [k, f] : values_) c.set(k, f());
        return c;
    }

    bool has_key(const std::string& key) const
    {
        for (const auto& [k, f] : values_)
            if (k == key) return true;
        return false;
    }

    const std::string& name() const { return name_; }
    CLI::App* app() const { return app_; }

private:
    std::string name_;
    CLI::App* app_;
    const RunConfig& file_;
    std::vector<std::pair<std::string, std::function<std::string()>>> values_;
};

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write '" + path + "'");
    return out;
}

/// Writes to `path`, or standard output when it is empty or "-".
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    auto out = open_output(path);
    out << text;
}

void finish_manifest(RunManifest& m, const std::vector<std::string>& outputs, const std::string& manifest_path)
{
    for (const auto& o : outputs)
        if (!o.empty() && o != "-") m.add_output(o);
    m.finished = utc_timestamp();
    if (!manifest_path.empty()) m.write(manifest_path);
}

std::string manifest_path_for(const std::string& out, const std::string& explicit_path)
{
    if (!explicit_path.empty()) return explicit_path;
    if (out.empty() || out == "-") return {};
    return out + ".manifest.json";
}

void check_exists(const std::string& path)
{
    if (!path.empty() && !std::filesystem::exists(path)) throw input_error("no such file: '" + path + "'");
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        // Config file: --config on the command line, else $CMFORGE_CONFIG.
        std::string config_path;
        for (int i = 1; i < argc; ++i) {
            std::string a = argv[i];
            if (a == "--config" && i + 1 < argc) config_path = argv[i + 1];
            if (a.rfind("--config=", 0) == 0) config_path = a.substr(9);
        }
        if (config_path.empty())
            if (const char* env = std::getenv("CMFORGE_CONFIG")) config_path = env;
        RunConfig file = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);

        CLI::App app{"cmforge: code-mixed text synthesis, QA retrieval and evaluation"};
        app.require_subcommand(1);
        app.fallthrough();
        app.set_version_flag("--version", kVersion);
        std::string config_flag = config_path;
        app.add_option("--config", config_flag, "key = value config file (also $CMFORGE_CONFIG)")
            ->capture_default_str();
        std::string manifest;
        app.add_option("--manifest", manifest, "manifest path (default <out>.manifest.json)");
        std::uint64_t seed = 13;
        if (auto v = file.get("seed")) seed = std::stoull(*v);
        app.add_option("--seed", seed, "random seed")->capture_default_str();

        std::vector<std::unique_ptr<Command>> commands;
        auto command = [&](const std::string& name, const std::string& desc) -> Command& {
            commands.push_back(std::make_unique<Command>(app, name, desc, file));
            return *commands.back();
        };

        // -- align-train
        struct {
            std::string pairs, out, src_lang = "en", tgt_lang = "hi";
            int iterations = 5;
            double tension = 4.0, null_prior = 0.08;
            bool lowercase = true;
        } at;
        auto& align_train = command("align-train", "train forward and reverse translation models");
        align_train.option("pairs", at.pairs, "parallel corpus TSV", true)->check(CLI::ExistingFile);
        align_train.option("src-lang", at.src_lang, "source language code");
        align_train.option("tgt-lang", at.tgt_lang, "target language code");
        align_train.option("iterations", at.iterations, "EM iterations")->check(CLI::PositiveNumber);
        align_train.option("tension", at.tension, "diagonal prior strength (0 = IBM Model 1)")
            ->check(CLI::NonNegativeNumber);
        align_train.option("null-prior", at.null_prior, "NULL alignment prior")->check(CLI::Range(0.0, 0.999));
        align_train.flag("lowercase", at.lowercase, "lowercase words before training");
        align_train.option("out", at.out, "model output (reverse model goes to <out>.rev)", true);

        // -- align-apply
        struct {
            std::string pairs, model, reverse, mode = "intersection", out, src_lang = "en", tgt_lang = "hi";
        } aa;
        auto& align_apply = command("align-apply", "word-align a parallel corpus");
        align_apply.option("pairs", aa.pairs, "parallel corpus TSV", true)->check(CLI::ExistingFile);
        align_apply.option("model", aa.model, "forward model from align-train", true)->check(CLI::ExistingFile);
        align_apply.option("reverse-model", aa.reverse, "reverse model (default <model>.rev)");
        align_apply.option("mode", aa.mode, "forward | reverse | intersection");
        align_apply.option("src-lang", aa.src_lang, "source language code");
        align_apply.option("tgt-lang", aa.tgt_lang, "target language code");
        align_apply.option("out", aa.out, "Pharaoh alignment output", true);

        // -- mix-sentence
        struct {
            std::string pairs, ann, align, links, mode = "intersection", out, src_lang = "en", tgt_lang = "hi";
            std::size_t max_phrase = 7;
            bool containment = false, transfer_case = true;
        } ms;
        auto& mix_sentence = command("mix-sentence", "generate code-mixed sentences from parallel pairs");
        mix_sentence.option("pairs", ms.pairs, "parallel corpus TSV (English source)", true)
            ->check(CLI::ExistingFile);
        mix_sentence.option("ann", ms.ann, "CoNLL annotations of the English side", true)->check(CLI::ExistingFile);
        mix_sentence.option("align", ms.align, "forward model (reverse at <align>.rev)");
        mix_sentence.option("links", ms.links, "Pharaoh alignments instead of a model");
        mix_sentence.option("mode", ms.mode, "symmetrization when aligning with a model");
        mix_sentence.option("max-phrase", ms.max_phrase, "maximum phrase length")->check(CLI::PositiveNumber);
        mix_sentence.flag("containment", ms.containment, "accept phrases whose source contains the span");
        mix_sentence.flag("transfer-case", ms.transfer_case, "copy initial capitalization of replaced words");
        mix_sentence.option("src-lang", ms.src_lang, "source language code");
        mix_sentence.option("tgt-lang", ms.tgt_lang, "target (matrix) language code");
        mix_sentence.option("out", ms.out, "TSV output", true);

        // -- mix-question
        struct {
            std::string questions, lexicon, unigrams, bigrams, translit = data_file("translit/devanagari_latin.tsv"),
                                                                out, dice = "as-written", lang = "hi";
            std::size_t top_k = 5;
            double min_prob = 0, epsilon = 1e-4;
            int max_iters = 100;
        } mq;
        auto& mix_question = command("mix-question", "generate code-mixed questions from annotated questions");
        mix_question.option("questions", mq.questions, "CoNLL annotated questions", true)->check(CLI::ExistingFile);
        mix_question.option("lexicon", mq.lexicon, "lexical translation TSV", true)->check(CLI::ExistingFile);
        mix_question.option("unigrams", mq.unigrams, "unigram counts TSV", true)->check(CLI::ExistingFile);
        mix_question.option("bigrams", mq.bigrams, "bigram counts TSV", true)->check(CLI::ExistingFile);
        mix_question.option("translit", mq.translit, "transliteration rules");
        mix_question.option("top-k", mq.top_k, "candidates kept per word")->check(CLI::PositiveNumber);
        mix_question.option("min-prob", mq.min_prob, "drop candidates below this probability");
        mix_question.option("epsilon", mq.epsilon, "disambiguation convergence threshold");
        mix_question.option("max-iters", mq.max_iters, "disambiguation iteration cap")->check(CLI::PositiveNumber);
        mix_question.option("dice", mq.dice, "as-written | classical");
        mix_question.option("lang", mq.lang, "question language code");
        mix_question.option("out", mq.out, "TSV output", true);

        // -- mix-metrics
        struct {
            std::string in, out;
            bool exclude_other = false;
        } mm;
        auto& mix_metrics = command("mix-metrics", "CMI and SPF of a code-mixed TSV");
        mix_metrics.option("in", mm.in, "TSV from mix-sentence or mix-question", true)->check(CLI::ExistingFile);
        mix_metrics.flag("exclude-other", mm.exclude_other, "leave language-independent tokens out of N");
        mix_metrics.option("out", mm.out, "JSON report (default stdout)");

        // -- index-build
        struct {
            std::string passages, stopwords = data_file("stopwords/en.txt") + "," + data_file("stopwords/hi.txt"),
                                  out;
        } ib;
        auto& index_build = command("index-build", "build a passage index");
        index_build.option("passages", ib.passages, "passage JSON-lines", true)->check(CLI::ExistingFile);
        index_build.option("stopwords", ib.stopwords, "comma-separated stopword files");
        index_build.option("out", ib.out, "index output", true);

        // -- qa-ask / qa-batch share their retrieval and scoring options
        struct {
            std::string index, passages, annotations, embeddings, patterns = data_file("qa/patterns.tsv"),
                                                                  answer_types = data_file("qa/answer_types.tsv"),
                                                                  factoid_weights = "0.31,0.18,0.39,0.12",
                                                                  descriptive_weights = "0.21,0.09,0.23,0.19,0.28",
                                                                  out;
            std::size_t top_n = 30;
            double k1 = 1.2, b = 0.75, tau = 0.9;
            bool drop_overlap = true;
            std::string question, qtype = "factoid", answer_type, lang = "en", questions;
        } qa;
        auto qa_options = [&](Command& c) {
            c.option("index", qa.index, "index from index-build", true)->check(CLI::ExistingFile);
            c.option("passages", qa.passages, "passage JSON-lines", true)->check(CLI::ExistingFile);
            c.option("annotations", qa.annotations, "CoNLL passage annotations with '# passage_id = X'");
            c.option("embeddings", qa.embeddings, "word vectors (text, 'count dim' header)");
            c.option("patterns", qa.patterns, "definitional patterns 'regex<TAB>weight'");
            c.option("answer-types", qa.answer_types, "answer type map");
            c.option("factoid-weights", qa.factoid_weights, "TCS,PS,NCS,SSS weights");
            c.option("descriptive-weights", qa.descriptive_weights, "TCS,PS,NCS,SSS,PMS weights");
            c.option("top-n", qa.top_n, "passages retrieved")->check(CLI::PositiveNumber);
            c.option("k1", qa.k1, "BM25 k1");
            c.option("b", qa.b, "BM25 b");
            c.option("tau", qa.tau, "descriptive closeness threshold")->check(CLI::Range(0.0, 1.0));
            c.flag("drop-overlap", qa.drop_overlap, "drop candidates made only of question words");
            c.option("out", qa.out, "JSON-lines output (default stdout)");
        };
        auto& qa_ask = command("qa-ask", "answer one question");
        qa_options(qa_ask);
        qa_ask.option("question", qa.question, "question text", true);
        qa_ask.option("qtype", qa.qtype, "factoid | descriptive");
        qa_ask.option("answer-type", qa.answer_type, "expected answer type (e.g. PERSON)");
        qa_ask.option("lang", qa.lang, "question language code");
        auto& qa_batch = command("qa-batch", "answer a file of questions");
        qa_options(qa_batch);
        qa_batch.option("questions", qa.questions, "QA records JSON-lines", true)->check(CLI::ExistingFile);

        // -- snippet
        struct {
            std::string passages, passage_id, question, embeddings, out,
                stopwords = data_file("stopwords/en.txt") + "," + data_file("stopwords/hi.txt");
            double d = 0.8, tol = 1e-8;
            int max_iters = 200;
            std::size_t top_k = 3;
        } sn;
        auto& snippet = command("snippet", "question-biased snippet of a passage");
        snippet.option("passages", sn.passages, "passage JSON-lines", true)->check(CLI::ExistingFile);
        snippet.option("passage-id", sn.passage_id, "passage to summarize", true);
        snippet.option("question", sn.question, "question text", true);
        snippet.option("embeddings", sn.embeddings, "word vectors");
        snippet.option("stopwords", sn.stopwords, "comma-separated stopword files");
        snippet.option("d", sn.d, "question bias")->check(CLI::Range(0.0, 1.0));
        snippet.option("tol", sn.tol, "power iteration tolerance");
        snippet.option("max-iters", sn.max_iters, "power iteration cap");
        snippet.option("top-k", sn.top_k, "sentences in the snippet");
        snippet.option("out", sn.out, "JSON output (default stdout)");

        // -- eval
        struct {
            std::string metric, pred, gold, out;
            int max_n = 4;
            bool smoothing = false;
            std::size_t k = 10;
        } ev;
        auto& eval = command("eval", "score predictions against gold data");
        eval.option("metric", ev.metric, "bleu | rouge-l | meteor | em-f1 | rank", true)
            ->check(CLI::IsMember({"bleu", "rouge-l", "meteor", "em-f1", "rank"}));
        eval.option("pred", ev.pred, "predictions JSON-lines", true)->check(CLI::ExistingFile);
        eval.option("gold", ev.gold, "gold JSON-lines", true)->check(CLI::ExistingFile);
        eval.option("max-n", ev.max_n, "BLEU order")->check(CLI::PositiveNumber);
        eval.flag("smoothing", ev.smoothing, "add-one smoothing for BLEU orders above 1");
        eval.option("k", ev.k, "cutoff for P@k and R@k")->check(CLI::PositiveNumber);
        eval.option("out", ev.out, "JSON report (default stdout)");

        for (const auto& [key, value] : file.values()) {
            bool known = key == "seed" || key == "config";
            for (const auto& c : commands) known = known || c->has_key(key);
            if (!known) std::cerr << "warning: unused config key '" << key << "'\n";
        }

        try {
            app.parse(argc, argv);
        } catch (const CLI::Success& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 1;
        }

        const Command* active = nullptr;
        for (const auto& c : commands)
            if (c->app()->parsed()) active = c.get();
        RunConfig resolved = active->resolved();
        resolved.set("seed", to_text(seed));
        RunManifest m = begin_manifest(active->name(), resolved);
        const std::string& cmd = active->name();

        if (cmd == "align-train") {
            m.add_input(at.pairs);
            auto pairs = load_parallel(at.pairs, LanguageTag(at.src_lang), LanguageTag(at.tgt_lang));
            align::TrainOptions opts{at.iterations, at.tension, at.null_prior, at.lowercase};
            auto fwd = align::train_model(pairs, opts, align::Direction::forward);
            auto rev = align::train_model(pairs, opts, align::Direction::reverse);
            {
                auto out = open_output(at.out);
                fwd.dump(out);
            }
            {
                auto out = open_output(at.out + ".rev");
                rev.dump(out);
            }
            std::cerr << "trained on " << pairs.size() << " pairs; log-likelihood " << fmt(fwd.log_likelihood().front())
                      << " -> " << fmt(fwd.log_likelihood().back()) << "\n";
            finish_manifest(m, {at.out, at.out + ".rev"}, manifest_path_for(at.out, manifest));
        } else if (cmd == "align-apply") {
            const std::string rev_path = aa.reverse.empty() ? aa.model + ".rev" : aa.reverse;
            check_exists(rev_path);
            for (const auto& p : {aa.pairs, aa.model, rev_path}) m.add_input(p);
            auto pairs = load_parallel(aa.pairs, LanguageTag(aa.src_lang), LanguageTag(aa.tgt_lang));
            auto fin = cmforge::detail::open_input(aa.model);
            auto rin = cmforge::detail::open_input(rev_path);
            auto fwd = align::TranslationModel::load(fin, align::Direction::forward);
            auto rev = align::TranslationModel::load(rin, align::Direction::reverse);
            auto mode = align::parse_mode(aa.mode);
            auto out = open_output(aa.out);
            std::size_t flagged = 0;
            for (const auto& p : pairs) {
                auto links = align::align_pair(fwd, rev, p, mode);
                if (!links.diagnostics.empty()) ++flagged;
                out << align::to_pharaoh(links.links) << '\n';
            }
            out.close();
            if (flagged) std::cerr << flagged << " pairs contain words unknown to the model\n";
            finish_manifest(m, {aa.out}, manifest_path_for(aa.out, manifest));
        } else if (cmd == "mix-sentence") {
            if (ms.align.empty() == ms.links.empty()) throw input_error("give exactly one of --align or --links");
            m.add_input(ms.pairs);
            m.add_input(ms.ann);
            auto pairs = load_parallel(ms.pairs, LanguageTag(ms.src_lang), LanguageTag(ms.tgt_lang));
            auto ann = load_annotations(ms.ann, LanguageTag(ms.src_lang));
            if (ann.size() != pairs.size())
                throw input_error("annotations cover " + std::to_string(ann.size()) + " sentences, corpus has " +
                                  std::to_string(pairs.size()));
            std::vector<std::vector<align::Link>> links;
            if (!ms.links.empty()) {
                m.add_input(ms.links);
                links = align::load_pharaoh(ms.links);
                if (links.size() != pairs.size()) throw input_error("alignment and corpus sizes differ");
            } else {
                check_exists(ms.align + ".rev");
                m.add_input(ms.align);
                m.add_input(ms.align + ".rev");
                auto fin = cmforge::detail::open_input(ms.align);
                auto rin = cmforge::detail::open_input(ms.align + ".rev");
                auto fwd = align::TranslationModel::load(fin, align::Direction::forward);
                auto rev = align::TranslationModel::load(rin, align::Direction::reverse);
                auto mode = align::parse_mode(ms.mode);
                for (const auto& p : pairs) links.push_back(align::align_pair(fwd, rev, p, mode).links);
            }
            mix::SentenceOptions opts;
            opts.containment = ms.containment;
            opts.transfer_case = ms.transfer_case;
            opts.embedded_lang = LanguageTag(ms.src_lang);
            opts.matrix_lang = LanguageTag(ms.tgt_lang);
            auto out = open_output(ms.out);
            std::size_t changed = 0;
            for (std::size_t k = 0; k < pairs.size(); ++k) {
                auto table = align::extract_phrases(pairs[k].source.size(), pairs[k].target.size(), links[k],
                                                    ms.max_phrase);
                auto s = mix::generate_cm_sentence(pairs[k], ann[k], table, opts);
                if (s.substitutions()) ++changed;
                mix::write_tagged_tsv(out, s);
            }
            out.close();
            std::cerr << changed << " of " << pairs.size() << " sentences mixed\n";
            finish_manifest(m, {ms.out}, manifest_path_for(ms.out, manifest));
        } else if (cmd == "mix-question") {
            for (const auto& p : {mq.questions, mq.lexicon, mq.unigrams, mq.bigrams, mq.translit}) {
                check_exists(p);
                m.add_input(p);
            }
            auto questions = load_annotations(mq.questions, LanguageTag(mq.lang));
            auto lex = lex::load_lex_table(mq.lexicon, {mq.top_k, mq.min_prob});
            auto ngrams = lex::load_ngrams(mq.unigrams, mq.bigrams);
            auto translit = lex::load_translit_table(mq.translit);
            mix::QuestionOptions opts;
            opts.disambig.epsilon = mq.epsilon;
            opts.disambig.max_iters = mq.max_iters;
            if (mq.dice == "classical")
                opts.disambig.dice = lex::DiceVariant::classical;
            else if (mq.dice != "as-written")
                throw input_error("--dice must be 'as-written' or 'classical'");
            auto out = open_output(mq.out);
            for (std::size_t k = 0; k < questions.size(); ++k) {
                auto s = mix::generate_cm_question(questions[k], lex, ngrams, translit, opts);
                auto id = questions[k].meta.find("id");
                s.id = id != questions[k].meta.end() ? id->second : std::to_string(k + 1);
                mix::write_tagged_tsv(out, s);
            }
            out.close();
            finish_manifest(m, {mq.out}, manifest_path_for(mq.out, manifest));
        } else if (cmd == "mix-metrics") {
            m.add_input(mm.in);
            auto sents = mix::load_tagged_tsv(mm.in);
            metrics::CmiOptions opts{mm.exclude_other};
            json j;
            j["sentences"] = sents.size();
            j["cmi"] = metrics::corpus_cmi(sents, opts).to_json();
            j["spf"] = metrics::corpus_spf(sents).to_json();
            emit(mm.out, j.dump(2) + "\n");
            finish_manifest(m, {mm.out}, manifest_path_for(mm.out, manifest));
        } else if (cmd == "index-build") {
            m.add_input(ib.passages);
            auto stop_paths = split_list(ib.stopwords);
            for (const auto& p : stop_paths) m.add_input(p);
            auto index = retrieval::build_index(retrieval::load_passages(ib.passages),
                                                retrieval::load_stopwords(stop_paths));
            {
                auto out = open_output(ib.out);
                index.save(out);
            }
            std::cerr << index.num_docs() << " passages, " << index.postings().size() << " terms\n";
            finish_manifest(m, {ib.out}, manifest_path_for(ib.out, manifest));
        } else if (cmd == "qa-ask" || cmd == "qa-batch") {
            for (const auto& p : {qa.index, qa.passages, qa.annotations, qa.embeddings, qa.patterns, qa.answer_types})
                if (!p.empty()) {
                    check_exists(p);
                    m.add_input(p);
                }
            pipeline::QaResources res;
            {
                auto in = cmforge::detail::open_input(qa.index);
                res.index = retrieval::PassageIndex::load(in);
            }
            for (auto& p : retrieval::load_passages(qa.passages)) res.passages[p.id] = std::move(p);
            res.stopwords = res.index.stopwords();
            res.idf = retrieval::IdfTable::from_index(res.index);
            if (!qa.annotations.empty())
                res.annotations = pipeline::group_by_passage(load_annotations(qa.annotations, LanguageTag("en")));
            std::optional<retrieval::EmbeddingLexicon> emb;
            if (!qa.embeddings.empty()) {
                emb = retrieval::load_embeddings(qa.embeddings);
                res.embeddings = &*emb;
            }
            if (!qa.patterns.empty()) res.patterns = qa::load_patterns(qa.patterns);
            if (!qa.answer_types.empty()) res.answer_types = qa::load_answer_types(qa.answer_types);
            pipeline::QaOptions opts;
            opts.top_n = qa.top_n;
            opts.bm25 = {qa.k1, qa.b};
            opts.weights.factoid = parse_weights<4>(qa.factoid_weights, "factoid-weights");
            opts.weights.descriptive = parse_weights<5>(qa.descriptive_weights, "descriptive-weights");
            opts.weights.validate();
            opts.rank.tau = qa.tau;
            opts.drop_question_overlap = qa.drop_overlap;

            std::vector<QARecord> records;
            if (cmd == "qa-ask") {
                QARecord r;
                r.id = "q1";
                r.language = LanguageTag(qa.lang);
                r.question = unannotated(tokenize(qa.question, r.language));
                r.qtype = parse_qtype(qa.qtype);
                if (!qa.answer_type.empty()) r.answer_type = qa.answer_type;
                records.push_back(std::move(r));
            } else {
                m.add_input(qa.questions);
                records = load_qa_records(qa.questions);
            }
            std::string text;
            for (const auto& r : records) text += pipeline::answer_question(r, res, opts).to_json().dump() + "\n";
            emit(qa.out, text);
            finish_manifest(m, {qa.out}, manifest_path_for(qa.out, manifest));
        } else if (cmd == "snippet") {
            m.add_input(sn.passages);
            auto stop_paths = split_list(sn.stopwords);
            for (const auto& p : stop_paths) m.add_input(p);
            auto stop = retrieval::load_stopwords(stop_paths);
            const retrieval::Passage* passage = nullptr;
            auto passages = retrieval::load_passages(sn.passages);
            for (const auto& p : passages)
                if (p.id == sn.passage_id) passage = &p;
            if (!passage) throw input_error("no passage with id '" + sn.passage_id + "'");
            std::optional<retrieval::EmbeddingLexicon> emb;
            if (!sn.embeddings.empty()) {
                m.add_input(sn.embeddings);
                emb = retrieval::load_embeddings(sn.embeddings);
            }
            auto sentences = qa::split_sentences(passage->text, LanguageTag(passage->language));
            if (sentences.empty()) throw input_error("passage '" + sn.passage_id + "' has no sentences");
            retrieval::SnippetOptions opts{sn.d, sn.tol, sn.max_iters, sn.top_k};
            auto rank = retrieval::snippet_rank(sn.question, sentences, stop, opts, emb ? &*emb : nullptr);
            json j;
            j["passage_id"] = sn.passage_id;
            j["d"] = rank.d;
            j["iterations"] = rank.iterations;
            j["sentences"] = json::array();
            for (std::size_t s = 0; s < sentences.size(); ++s)
                j["sentences"].push_back({{"index", s}, {"text", sentences[s]}, {"score", rank.scores[s]}});
            j["top"] = rank.top;
            std::vector<std::size_t> in_order = rank.top;
            std::sort(in_order.begin(), in_order.end());
            std::vector<std::string> parts;
            for (auto s : in_order) parts.push_back(sentences[s]);
            j["snippet"] = join(parts);
            emit(sn.out, j.dump(2) + "\n");
            finish_manifest(m, {sn.out}, manifest_path_for(sn.out, manifest));
        } else if (cmd == "eval") {
            m.add_input(ev.pred);
            m.add_input(ev.gold);
            auto id_of = [](const json& j) {
                for (const char* key : {"id", "query_id", "question_id"})
                    if (j.contains(key)) return j[key].is_string() ? j[key].get<std::string>() : j[key].dump();
                throw input_error("record without id");
            };
            auto golds_of = [](const json& j) {
                for (const char* key : {"answers", "references"})
                    if (j.contains(key)) return j[key].get<std::vector<std::string>>();
                for (const char* key : {"answer", "reference", "prediction"})
                    if (j.contains(key)) return std::vector<std::string>{j[key].get<std::string>()};
                throw input_error("gold record without answers");
            };
            auto pred_of = [](const json& j) {
                for (const char* key : {"prediction", "answer"})
                    if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
                return std::string();
            };
            std::map<std::string, json> pred, gold;
            for (auto& j : load_jsonl(ev.pred)) pred[id_of(j)] = j;
            for (auto& j : load_jsonl(ev.gold)) gold[id_of(j)] = j;
            auto words = [](const std::string& s) { return surfaces(tokenize(s, LanguageTag::other())); };

            json j;
            j["metric"] = ev.metric;
            j["items"] = gold.size();
            if (ev.metric == "bleu") {
                std::vector<metrics::Words> cands;
                std::vector<std::vector<metrics::Words>> refs;
                for (const auto& [id, g] : gold) {
                    auto it = pred.find(id);
                    cands.push_back(it == pred.end() ? metrics::Words{} : words(pred_of(it->second)));
                    std::vector<metrics::Words> r;
                    for (const auto& s : golds_of(g)) r.push_back(words(s));
                    refs.push_back(std::move(r));
                }
                j["value"] = metrics::bleu(cands, refs, {ev.max_n, ev.smoothing});
                j["params"] = {{"max_n", ev.max_n}, {"smoothing", ev.smoothing}};
            } else if (ev.metric == "rouge-l" || ev.metric == "meteor") {
                metrics::Accumulator acc;
                json items = json::array();
                for (const auto& [id, g] : gold) {
                    auto it = pred.find(id);
                    auto cand = it == pred.end() ? metrics::Words{} : words(pred_of(it->second));
                    double best = 0;
                    for (const auto& s : golds_of(g)) {
                        auto ref = words(s);
                        double v = ev.metric == "meteor" ? metrics::meteor_lite(cand, ref)
                                                         : metrics::rouge_l(cand, ref).f;
                        best = std::max(best, v);
                    }
                    acc.add(best);
                    items.push_back({{"id", id}, {"value", best}});
                }
                j["value"] = acc.mean();
                j["per_item"] = items;
            } else if (ev.metric == "em-f1") {
                std::map<std::string, std::string> p;
                std::map<std::string, std::vector<std::string>> g;
                for (const auto& [id, x] : pred) p[id] = pred_of(x);
                for (const auto& [id, x] : gold) g[id] = golds_of(x);
                auto s = metrics::qa_span_metrics(p, g);
                j["em"] = s.em;
                j["f1"] = s.f1;
                j["per_item"] = json::array();
                for (const auto& [id, v] : s.per_item)
                    j["per_item"].push_back({{"id", id}, {"em", v.first}, {"f1", v.second}});
            } else {
                std::vector<metrics::RankedList> lists;
                for (const auto& [id, g] : gold) {
                    metrics::RankedList l;
                    l.query_id = id;
                    auto rel = g.at("relevant").get<std::vector<std::string>>();
                    l.relevant.insert(rel.begin(), rel.end());
                    auto it = pred.find(id);
                    if (it != pred.end()) {
                        auto ranking = it->second.at("ranking").get<std::vector<std::string>>();
                        for (std::size_t r = 0; r < ranking.size(); ++r)
                            l.items.emplace_back(ranking[r], static_cast<double>(ranking.size() - r));
                    }
                    lists.push_back(std::move(l));
                }
                auto s = metrics::rank_metrics(lists, ev.k);
                j["k"] = ev.k;
                j["precision_at_k"] = s.precision_at_k;
                j["recall_at_k"] = s.recall_at_k;
                j["map"] = s.map;
                j["mrr"] = s.mrr;
                j["queries"] = s.queries;
            }
            emit(ev.out, j.dump(2) + "\n");
            finish_manifest(m, {ev.out}, manifest_path_for(ev.out, manifest));
        }
        return 0;
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
}
