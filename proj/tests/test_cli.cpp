#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cmforge/cmforge.hpp"
#include "golden.hpp"

using namespace cmforge;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("cmforge_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& text)
    {
        auto p = dir_ / name;
        std::ofstream(p, std::ios::binary) << text;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    CliResult run(const std::string& args, const std::string& env = "unset CMFORGE_CONFIG;") const
    {
        auto o = dir_ / "stdout.txt", e = dir_ / "stderr.txt";
        std::string cmd = env + " '" + std::string(CMFORGE_CLI) + "' " + args + " >'" + o.string() + "' 2>'" +
                          e.string() + "'";
        int status = std::system(cmd.c_str());
        CliResult r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(o);
        r.err = slurp(e);
        return r;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpListsSubcommandsAndDefaults)
{
    auto top = run("--help");
    EXPECT_EQ(top.code, 0);
    for (const char* sub : {"align-train", "align-apply", "mix-sentence", "mix-question", "mix-metrics", "index-build",
                            "qa-ask", "qa-batch", "snippet", "eval"})
        EXPECT_NE(top.out.find(sub), std::string::npos) << sub;
    auto sub = run("align-train --help");
    EXPECT_EQ(sub.code, 0);
    EXPECT_NE(sub.out.find("--tension"), std::string::npos);
    EXPECT_NE(sub.out.find("0.08"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitOne)
{
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("no-such-command").code, 1);
    EXPECT_EQ(run("eval --bogus").code, 1);
    EXPECT_EQ(run("mix-metrics --in " + path("absent.tsv")).code, 1);
}

TEST_F(Cli, BadInputExitsOneWithMessage)
{
    auto lex = file("lex.tsv", "a\tb\tlots\n");
    auto u = file("u.tsv", "b\t1\n"), b = file("b.tsv", "");
    auto q = file("q.conll", "a\tNN\tO\tO\n");
    auto r = run("mix-question --questions " + q + " --lexicon " + lex + " --unigrams " + u + " --bigrams " + b +
                 " --out " + path("o.tsv"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
}

TEST_F(Cli, MixSentenceMatchesLibrary)
{
    auto pairs = file("pairs.tsv", golden::pairs_en_hi);
    auto ann = file("en.conll", golden::ann_en_hi);
    auto links = file("links.txt", golden::links_en_hi);
    auto r = run("mix-sentence --pairs " + pairs + " --ann " + ann + " --links " + links + " --out " + path("o.tsv"));
    ASSERT_EQ(r.code, 0) << r.err;

    auto corpus = load_parallel(pairs, LanguageTag("en"), LanguageTag("hi"));
    auto anns = load_annotations(ann, LanguageTag("en"));
    auto al = align::load_pharaoh(links);
    std::ostringstream want;
    for (std::size_t k = 0; k < corpus.size(); ++k) {
        auto table = align::extract_phrases(corpus[k].source.size(), corpus[k].target.size(), al[k], 7);
        mix::write_tagged_tsv(want, mix::generate_cm_sentence(corpus[k], anns[k], table));
    }
    EXPECT_EQ(slurp(path("o.tsv")), want.str());
    EXPECT_TRUE(fs::exists(path("o.tsv.manifest.json")));
}

TEST_F(Cli, MixQuestionMatchesLibrary)
{
    auto q = file("q.conll", golden::questions_conll);
    auto lex = file("lex.tsv", golden::lexicon_tsv);
    auto u = file("u.tsv", golden::unigrams_tsv), b = file("b.tsv", golden::bigrams_tsv);
    auto r = run("mix-question --questions " + q + " --lexicon " + lex + " --unigrams " + u + " --bigrams " + b +
                 " --out " + path("o.tsv"));
    ASSERT_EQ(r.code, 0) << r.err;

    auto table = lex::load_lex_table(lex);
    auto ngrams = lex::load_ngrams(u, b);
    auto translit = lex::load_translit_table(std::string(CMFORGE_DATA_DIR) + "/translit/devanagari_latin.tsv");
    auto questions = load_annotations(q, LanguageTag("hi"));
    std::ostringstream want;
    for (std::size_t k = 0; k < questions.size(); ++k) {
        auto s = mix::generate_cm_question(questions[k], table, ngrams, translit);
        auto id = questions[k].meta.find("id");
        s.id = id != questions[k].meta.end() ? id->second : std::to_string(k + 1);
        mix::write_tagged_tsv(want, s);
    }
    EXPECT_EQ(slurp(path("o.tsv")), want.str());

    auto m = run("mix-metrics --in " + path("o.tsv"));
    ASSERT_EQ(m.code, 0) << m.err;
    auto j = nlohmann::json::parse(m.out);
    auto sents = mix::load_tagged_tsv(path("o.tsv"));
    EXPECT_DOUBLE_EQ(j["cmi"]["corpus_value"].get<double>(), metrics::corpus_cmi(sents).corpus_value);
    EXPECT_DOUBLE_EQ(j["spf"]["corpus_value"].get<double>(), metrics::corpus_spf(sents).corpus_value);
}

TEST_F(Cli, ConfigFileSuppliesDefaultsAndFlagsWin)
{
    auto in = file("in.tsv", "1\tराम house !\thi en other\tkept phrase-substituted kept\n");
    auto cfg = file("run.cfg", "exclude-other = true\n");
    auto manifest = path("m.json");
    auto r = run("mix-metrics --in " + in + " --manifest " + manifest, "CMFORGE_CONFIG='" + cfg + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(slurp(manifest));
    EXPECT_EQ(j["config"]["exclude-other"], "true");
    EXPECT_EQ(j["inputs"][in], sha256_file(in));

    r = run("mix-metrics --no-exclude-other --in " + in + " --manifest " + manifest + " --config " + cfg);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(slurp(manifest))["config"]["exclude-other"], "false");

    auto bad = file("bad.cfg", "exclude-other = maybe\n");
    EXPECT_EQ(run("mix-metrics --in " + in + " --config " + bad).code, 1);
}

TEST_F(Cli, EvalBleuOfGoldAgainstItselfIsOne)
{
    auto gold = file("gold.jsonl", "{\"id\": \"1\", \"answers\": [\"the diamond ring\"]}\n"
                                   "{\"id\": \"2\", \"answers\": [\"Ravi Sharma\"]}\n");
    auto pred = file("pred.jsonl", "{\"id\": \"1\", \"prediction\": \"the diamond ring\"}\n"
                                   "{\"id\": \"2\", \"prediction\": \"Ravi Sharma\"}\n");
    auto r = run("eval --metric bleu --pred " + pred + " --gold " + gold);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), 1.0, 1e-12);
    auto em = run("eval --metric em-f1 --pred " + pred + " --gold " + gold);
    ASSERT_EQ(em.code, 0) << em.err;
    EXPECT_EQ(nlohmann::json::parse(em.out)["em"].get<double>(), 100.0);
}
