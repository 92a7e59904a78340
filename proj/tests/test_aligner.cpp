#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cmforge/aligner.hpp"
#include "corpora.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cmforge;
using namespace cmforge::align;

namespace {

TrainOptions ibm1(int iters)
{
    TrainOptions o;
    o.iterations = iters;
    o.tension = 0.0;
    return o;
}

std::vector<std::pair<std::size_t, std::size_t>> as_pairs(const std::vector<Link>& links)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& l : links) out.emplace_back(l.source, l.target);
    return out;
}

std::vector<oracle::Box> as_boxes(const PhraseTable& t)
{
    std::vector<oracle::Box> out;
    for (const auto& e : t.entries) out.push_back({e.source.start, e.source.end, e.target.start, e.target.end});
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST(Train, SinglePairForcesProbabilityOne)
{
    auto m = train_model(helpers::pairs({{"a", "x"}}), ibm1(5));
    EXPECT_NEAR(m.prob("a", "x"), 1.0, 1e-12);
}

TEST(Train, OneStepMatchesHandExecutedEm)
{
    auto corpus = helpers::pairs({{"a b", "x y"}, {"a", "x"}});
    auto m = train_model(corpus, ibm1(1));
    auto expected = oracle::ibm1_one_step({{{"a", "b"}, {"x", "y"}}, {{"a"}, {"x"}}}, m.null_prior());
    for (const auto& [k, v] : expected) EXPECT_NEAR(m.prob(k.first, k.second), v, 1e-12) << k.first << "->" << k.second;
    EXPECT_GT(m.prob("a", "x"), m.prob("a", "y"));
}

TEST(Train, EmptyCorpusIsAnError)
{
    EXPECT_THROW(train_model({}, {}), input_error);
    EXPECT_THROW(train_model(helpers::pairs({{"a", "x"}}), ibm1(0)), input_error);
}

TEST(Train, BijectiveDictionaryArgmax)
{
    auto c = synth::bijective_corpus(500, 50, 17);
    auto m = train_model(helpers::pairs(c.lines), TrainOptions{});
    for (const auto& s : m.vocab_src()) {
        auto dist = m.distribution(s);
        auto best = std::max_element(dist.begin(), dist.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
        ASSERT_NE(best, dist.end());
        EXPECT_EQ(best->first, "t" + s.substr(1));
    }
}

TEST(Train, DistributionsAreNormalized)
{
    auto c = synth::bijective_corpus(60, 15, 3);
    for (double lambda : {0.0, 4.0}) {
        TrainOptions o;
        o.tension = lambda;
        auto m = train_model(helpers::pairs(c.lines), o);
        const auto vocab = m.vocab_src();
        std::vector<std::string> sources(vocab.begin(), vocab.end());
        sources.push_back(kNullWord);
        for (const auto& s : sources) {
            double z = 0;
            for (const auto& [t, p] : m.distribution(s)) {
                EXPECT_GE(p, 0.0);
                EXPECT_LE(p, 1.0);
                z += p;
            }
            EXPECT_NEAR(z, 1.0, 1e-6) << s;
        }
    }
}

TEST(Train, LogLikelihoodNonDecreasingUnderIbm1)
{
    auto c = synth::bijective_corpus(100, 20, 8);
    auto m = train_model(helpers::pairs(c.lines), ibm1(8));
    const auto& ll = m.log_likelihood();
    ASSERT_EQ(ll.size(), 9u);
    for (std::size_t k = 1; k < ll.size(); ++k) EXPECT_GE(ll[k], ll[k - 1] - 1e-9) << "iteration " << k;
}

TEST(Train, DumpIsDeterministicAndRoundTrips)
{
    auto c = synth::bijective_corpus(40, 12, 21);
    auto corpus = helpers::pairs(c.lines);
    std::ostringstream a, b, again;
    train_model(corpus, {}).dump(a);
    train_model(corpus, {}).dump(b);
    EXPECT_EQ(a.str(), b.str());
    std::istringstream in(a.str());
    auto loaded = TranslationModel::load(in);
    loaded.dump(again);
    EXPECT_EQ(again.str(), a.str());
    EXPECT_EQ(loaded.tension(), 4.0);
    EXPECT_EQ(loaded.iterations(), 5);
}

TEST(Train, LoadRejectsBadLines)
{
    std::istringstream bad("#tension=4 #iters=5\na\tx\tnope\n");
    EXPECT_THROW(TranslationModel::load(bad), parse_error);
    std::istringstream range("a\tx\t1.5\n");
    EXPECT_THROW(TranslationModel::load(range), parse_error);
}

TEST(Align, TrivialPair)
{
    auto corpus = helpers::pairs({{"a", "x"}});
    auto f = train_model(corpus, ibm1(5));
    auto r = train_model(corpus, ibm1(5), Direction::reverse);
    auto links = align_pair(f, r, corpus[0]);
    EXPECT_EQ(links.links, (std::vector<Link>{{0, 0}}));
    EXPECT_TRUE(links.diagnostics.empty());
}

TEST(Align, IdentityCorpus)
{
    auto corpus = helpers::pairs({{"a b c", "a b c"}, {"a b", "a b"}, {"b c", "b c"}, {"c a", "c a"}});
    auto f = train_model(corpus, {});
    auto r = train_model(corpus, {}, Direction::reverse);
    auto links = align_pair(f, r, corpus[0]);
    EXPECT_EQ(links.links, (std::vector<Link>{{0, 0}, {1, 1}, {2, 2}}));
}

TEST(Align, HandBuiltModelLinksGirlAndRedUmbrella)
{
    std::istringstream fwd_text(
        "#tension=0 #iters=1\n"
        "girl\tलड़की\t0.9\nred\tलाल\t0.9\numbrella\tछाता\t0.9\nwith\tवाली\t0.6\n");
    std::istringstream rev_text(
        "#tension=0 #iters=1\n"
        "लड़की\tgirl\t0.9\nलाल\tred\t0.9\nछाता\tumbrella\t0.9\nवाली\twith\t0.6\n");
    auto f = TranslationModel::load(fwd_text);
    auto r = TranslationModel::load(rev_text, Direction::reverse);
    auto pair = helpers::pair("the girl with the red umbrella", "लाल छाता वाली लड़की");
    auto links = align_pair(f, r, pair);
    EXPECT_TRUE(links.contains({1, 3}));
    EXPECT_TRUE(links.contains({4, 0}));
    EXPECT_TRUE(links.contains({5, 1}));
    EXPECT_FALSE(links.diagnostics.empty());  // "the" is unknown

    auto phrases = extract_phrases(pair, links, 7);
    auto span = lookup_aligned_span(phrases, Span{4, 6});
    ASSERT_TRUE(span.has_value());
    EXPECT_EQ(*span, (Span{0, 2}));
}

TEST(Align, IntersectionIsSubsetOfBothDirections)
{
    auto c = synth::bijective_corpus(80, 15, 4);
    auto corpus = helpers::pairs(c.lines);
    TrainOptions o;
    o.iterations = 2;
    auto f = train_model(corpus, o);
    auto r = train_model(corpus, o, Direction::reverse);
    for (const auto& p : corpus) {
        auto both = align_pair(f, r, p, Mode::intersection);
        auto fw = align_pair(f, r, p, Mode::forward);
        auto rv = align_pair(f, r, p, Mode::reverse);
        for (const auto& l : both.links) {
            EXPECT_TRUE(fw.contains(l));
            EXPECT_TRUE(rv.contains(l));
        }
        for (const auto& l : fw.links) {
            EXPECT_LT(l.source, p.source.size());
            EXPECT_LT(l.target, p.target.size());
        }
    }
}

TEST(Pharaoh, RoundTripAndErrors)
{
    auto links = parse_pharaoh("2-1 0-0 0-0 1-2");
    EXPECT_EQ(to_pharaoh(links), "0-0 1-2 2-1");
    EXPECT_THROW(parse_pharaoh("0-"), input_error);
    EXPECT_THROW(parse_pharaoh("a-1"), input_error);
    EXPECT_THROW(extract_phrases(2, 2, {{0, 5}}, 3), input_error);
}

TEST(Phrases, SingleToken)
{
    auto t = extract_phrases(1, 1, {{0, 0}}, 7);
    ASSERT_EQ(t.entries.size(), 1u);
    EXPECT_EQ(t.entries[0], (PhrasePair{Span{0, 1}, Span{0, 1}}));
    EXPECT_EQ(lookup_aligned_span(t, Span{0, 1}), (Span{0, 1}));
}

TEST(Phrases, MonotoneTwoTokens)
{
    auto t = extract_phrases(2, 2, {{0, 0}, {1, 1}}, 2);
    EXPECT_EQ(t.entries.size(), 3u);
    EXPECT_EQ(as_boxes(t), oracle::consistent_boxes(2, 2, {{0, 0}, {1, 1}}, 2));
}

TEST(Phrases, CrossingLinks)
{
    // Each link forms a consistent unit box of its own.
    auto unit = extract_phrases(2, 2, {{0, 1}, {1, 0}}, 1);
    EXPECT_EQ(unit.entries, (std::vector<PhrasePair>{{Span{0, 1}, Span{1, 2}}, {Span{1, 2}, Span{0, 1}}}));
    auto t = extract_phrases(2, 2, {{0, 1}, {1, 0}}, 2);
    EXPECT_EQ(t.entries.size(), 3u);
    EXPECT_EQ(as_boxes(t), oracle::consistent_boxes(2, 2, {{0, 1}, {1, 0}}, 2));
    EXPECT_TRUE(std::count(t.entries.begin(), t.entries.end(), PhrasePair{Span{0, 2}, Span{0, 2}}) == 1);
}

TEST(Phrases, LookupMissingSpan)
{
    auto t = extract_phrases(3, 3, {{0, 0}, {2, 2}}, 7);
    EXPECT_FALSE(lookup_aligned_span(t, Span{1, 2}).has_value());
    // Smallest containing source span, then smallest target: the unaligned
    // target word 1 is left out.
    EXPECT_EQ(lookup_aligned_span(t, Span{1, 2}, true), (Span{0, 1}));
}

TEST(Phrases, MatchesBruteForceOnRandomPairs)
{
    std::mt19937 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + rng() % 8, m = 1 + rng() % 8, max_len = 1 + rng() % 8;
        std::vector<Link> links;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (rng() % 5 == 0) links.push_back({i, j});
        auto t = extract_phrases(n, m, links, max_len);
        ASSERT_EQ(as_boxes(t), oracle::consistent_boxes(n, m, as_pairs(links), max_len))
            << "trial " << trial << " links " << to_pharaoh(links);
    }
}
