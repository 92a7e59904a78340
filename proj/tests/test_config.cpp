#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cmforge/config.hpp"

using namespace cmforge;

namespace {

RunConfig config_of(const std::string& text)
{
    std::istringstream in(text);
    return RunConfig::parse(in);
}

}  // namespace

TEST(RunConfig, ParsesCommentsBlanksAndTrimming)
{
    auto c = config_of("# run\n\n  top-n =  12 \nmode=intersection\r\nfactoid-weights = 0.3,0.2,0.4,0.1\n");
    EXPECT_EQ(c.get("top-n"), "12");
    EXPECT_EQ(c.get("mode"), "intersection");
    EXPECT_EQ(c.get("factoid-weights"), "0.3,0.2,0.4,0.1");
    EXPECT_FALSE(c.get("missing"));
}

TEST(RunConfig, LastValueWins)
{
    auto c = config_of("tau = 0.5\ntau = 0.7\n");
    EXPECT_EQ(c.get("tau"), "0.7");
    EXPECT_EQ(c.values().size(), 1u);
}

TEST(RunConfig, CanonicalFormIsSortedAndOrderFree)
{
    auto a = config_of("b = 2\na = 1\n");
    auto b = config_of("a = 1\nb = 2\n");
    EXPECT_EQ(a.canonical(), "a=1\nb=2\n");
    EXPECT_EQ(a.canonical(), b.canonical());
}

TEST(RunConfig, ErrorsNameTheLine)
{
    try {
        config_of("a = 1\njust words\n");
        FAIL() << "expected an error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(config_of("= 3\n"), parse_error);
    EXPECT_THROW(config_of("Top = 3\n"), parse_error);
    EXPECT_THROW(RunConfig::load("/nonexistent/run.cfg"), input_error);
}

TEST(Sha256, KnownVectors)
{
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Manifest, RecordsHashesOfInputsAndConfig)
{
    auto dir = std::filesystem::temp_directory_path() / "cmforge_manifest_test";
    std::filesystem::create_directories(dir);
    auto input = (dir / "in.txt").string();
    {
        std::ofstream(input) << "abc";
    }
    auto config = config_of("k = v\n");
    auto m = begin_manifest("eval", config);
    m.add_input(input);
    m.finished = utc_timestamp();
    auto path = (dir / "m.json").string();
    m.write(path);

    std::ifstream in(path);
    auto j = nlohmann::json::parse(in);
    EXPECT_EQ(j["subcommand"], "eval");
    EXPECT_EQ(j["version"], kVersion);
    EXPECT_EQ(j["inputs"][input], sha256_hex("abc"));
    EXPECT_EQ(j["config"]["k"], "v");
    EXPECT_EQ(j["config_hash"], sha256_hex("eval\nk=v\n"));
    EXPECT_EQ(j["started"].get<std::string>().size(), 20u);
    std::filesystem::remove_all(dir);
}
