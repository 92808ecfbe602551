#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "setcomp/corpus.hpp"

using namespace setcomp;

namespace {

Dataset parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_sets(in);
}

std::string format(const Dataset& d)
{
    std::ostringstream out;
    format_sets(out, d);
    return out.str();
}

} // namespace

TEST(BitSets, MostSignificantBitFirst)
{
    const std::vector<std::uint8_t> a{0xA0};
    const Dataset d = gen_bit_sets(a, 1);
    EXPECT_EQ(d.universe, 8u);
    ASSERT_EQ(d.sets.size(), 1u);
    EXPECT_EQ(d.sets[0].elements(), (std::vector<std::uint64_t>{0, 2}));

    const std::vector<std::uint8_t> zero{0x00};
    EXPECT_TRUE(gen_bit_sets(zero, 1).sets[0].empty());

    const std::vector<std::uint8_t> ones{0xFF, 0xFF, 0xFF};
    const Dataset full = gen_bit_sets(ones, 3);
    EXPECT_EQ(full.universe, 24u);
    EXPECT_EQ(full.sets[0].size(), 24u);
}

TEST(BitSets, PartialGroupIsPaddedAndFlagged)
{
    const std::vector<std::uint8_t> bytes{0x01, 0x02, 0x03, 0x80};
    const Dataset d = gen_bit_sets(bytes, 3);
    ASSERT_EQ(d.sets.size(), 2u);
    EXPECT_EQ(d.sets[1].elements(), (std::vector<std::uint64_t>{0}));
    EXPECT_NE(d.label.find("padded=2"), std::string::npos);
    EXPECT_EQ(gen_bit_sets(std::vector<std::uint8_t>{1, 2, 3}, 3).label.find("padded"), std::string::npos);
}

TEST(Multiples, SupportDensityAndMean)
{
    const Dataset full = gen_multiples(1000, 100, 1.0, 5, 1);
    for (const auto& s : full.sets)
        EXPECT_EQ(s.elements(), (std::vector<std::uint64_t>{0, 100, 200, 300, 400, 500, 600, 700, 800, 900}));

    const Dataset d = gen_multiples(10000, 100, 0.5, 1000, 2);
    for (const auto& s : d.sets)
        for (auto x : s.elements())
            ASSERT_EQ(x % 100, 0u);
    const double mean = static_cast<double>(d.total_elements()) / 1000.0;
    // per-set size ~ Binomial(100, 1/2): sd of the mean = 5 / sqrt(1000)
    EXPECT_NEAR(mean, 50.0, 3 * 5.0 / std::sqrt(1000.0));
}

TEST(Multiples, DeterministicUnderSeed)
{
    EXPECT_EQ(format(gen_multiples(500, 3, 0.4, 20, 9)), format(gen_multiples(500, 3, 0.4, 20, 9)));
    EXPECT_NE(format(gen_multiples(500, 3, 0.4, 20, 9)), format(gen_multiples(500, 3, 0.4, 20, 10)));
}

TEST(Support, PrefixAndRandom)
{
    const Dataset pre = gen_support(1000, 40, SupportMode::prefix, 1.0, 3, 1);
    for (const auto& s : pre.sets) {
        ASSERT_EQ(s.size(), 40u);
        EXPECT_EQ(s.elements().back(), 39u);
    }

    const Dataset rnd = gen_support(1000, 40, SupportMode::random, 0.5, 200, 1);
    std::set<std::uint64_t> seen;
    for (const auto& s : rnd.sets)
        seen.insert(s.elements().begin(), s.elements().end());
    EXPECT_LE(seen.size(), 40u);
    EXPECT_GE(seen.size(), 39u);  // 200 draws at 1/2 miss an element w.p. 2^-200

    const Dataset all = gen_support(300, 300, SupportMode::random, 1.0, 2, 5);
    EXPECT_EQ(all.sets[0].size(), 300u);
    EXPECT_THROW(gen_support(10, 11, SupportMode::prefix, 0.5, 1, 1), ContractError);
}

TEST(Zipf, ExpectedSizeMatchesMean)
{
    const double mean_size = 60;
    const auto p = zipf_inclusion(5000, 1.2, mean_size);
    double sum = 0, var = 0;
    for (double x : p) {
        sum += x;
        var += x * (1 - x);
    }
    EXPECT_NEAR(sum, mean_size, 1e-6);

    const Dataset d = gen_zipf(5000, 1.2, mean_size, 1000, 3);
    const double observed = static_cast<double>(d.total_elements()) / 1000.0;
    EXPECT_NEAR(observed, mean_size, 3 * std::sqrt(var / 1000.0));
}

TEST(Zipf, SmallExponentApproachesUniform)
{
    const auto p = zipf_inclusion(100, 1e-9, 10);
    for (double x : p)
        EXPECT_NEAR(x, 0.1, 1e-6);
}

TEST(Zipf, RelabelingKeepsFrequencyProfile)
{
    const Dataset a = gen_zipf(400, 1.1, 20, 300, 4, true);
    const Dataset b = gen_zipf(400, 1.1, 20, 300, 4, false);
    const auto counts = [](const Dataset& d) {
        std::vector<std::uint64_t> c(d.universe, 0);
        for (const auto& s : d.sets)
            for (auto x : s.elements())
                ++c[x];
        return c;
    };
    auto ca = counts(a);
    auto cb = counts(b);
    EXPECT_GT(cb[0], cb[399]);  // unrelabeled: frequency follows element order
    EXPECT_NE(ca, cb);
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    EXPECT_EQ(ca, cb);
    EXPECT_THROW(gen_zipf(10, 1.0, 11, 1, 1), ContractError);
}

TEST(SetsFile, CanonicalRoundTrip)
{
    const std::string text = "# demo\nU=11\nS 2 3 5 6 7 10\nS\nS 0\n";
    const Dataset d = parse(text);
    EXPECT_EQ(d.label, "demo");
    EXPECT_EQ(d.universe, 11u);
    ASSERT_EQ(d.sets.size(), 3u);
    EXPECT_TRUE(d.sets[1].empty());
    EXPECT_EQ(format(d), text);
}

TEST(SetsFile, ToleratesBlankLinesAndComments)
{
    const Dataset d = parse("\n# a\n# b\nU=5\n\nS 1\n# mid\nS 2 4\n");
    EXPECT_EQ(d.label, "a");
    EXPECT_EQ(d.sets.size(), 2u);
}

TEST(SetsFile, ErrorsNameTheLine)
{
    const auto message = [](const std::string& text) {
        try {
            parse(text);
        } catch (const FormatError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("U=5\nS 1\nS 5\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("U=5\nS 3 2\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("U=5\nS 2 2\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("U=5\nT 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("U=5\nS x\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("S 1\n").find("line 1"), std::string::npos);
    EXPECT_EQ(message("").find("no error"), std::string::npos);
}
