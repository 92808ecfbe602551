#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "setcomp/distributions.hpp"

using namespace setcomp;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

// ---- oracles: exact rational arithmetic ----------------------------------

cpp_int choose_exact(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        return 0;
    cpp_int r = 1;
    for (std::uint64_t i = 0; i < k; ++i)
        r = r * (n - i) / (i + 1);
    return r;
}

double to_double(const cpp_rational& r) { return static_cast<double>(Big(r)); }

double hypergeometric_exact(std::uint64_t s, std::uint64_t f, std::uint64_t n, std::uint64_t m)
{
    if (m > s || n < m || n - m > f)
        return 0.0;
    return to_double(cpp_rational(choose_exact(s, m) * choose_exact(f, n - m), choose_exact(s + f, n)));
}

// Sequential biased urn: each draw takes a left ball with probability
// w*s_left / (w*s_left + f_left). This is Wallenius' distribution by
// definition, independent of the integral representation.
std::vector<double> wallenius_urn(std::uint64_t s, std::uint64_t f, std::uint64_t n, double w)
{
    std::vector<double> dp(n + 1, 0.0);  // dp[m] = P(m left balls after k draws)
    dp[0] = 1.0;
    for (std::uint64_t k = 0; k < n; ++k) {
        std::vector<double> next(n + 1, 0.0);
        for (std::uint64_t m = 0; m <= k; ++m) {
            if (dp[m] == 0.0)
                continue;
            const double sl = static_cast<double>(s) - static_cast<double>(m);
            const double fl = static_cast<double>(f) - static_cast<double>(k - m);
            if (sl < 0 || fl < 0)
                continue;
            const double denom = w * sl + fl;
            const double pl = denom > 0 ? w * sl / denom : 0.0;
            if (pl > 0)
                next[m + 1] += dp[m] * pl;
            if (pl < 1)
                next[m] += dp[m] * (1 - pl);
        }
        dp = std::move(next);
    }
    return dp;
}

} // namespace

TEST(LogFactorial, MatchesExactFactorials)
{
    for (std::uint64_t n = 0; n <= 200; ++n) {
        cpp_int fact = 1;
        for (std::uint64_t i = 2; i <= n; ++i)
            fact *= i;
        const double exact = static_cast<double>(log(Big(fact)));
        EXPECT_NEAR(log_factorial(n), exact, 1e-12 * std::max(1.0, exact)) << n;
    }
}

TEST(LogFactorial, LargeArgumentsAgreeWithLgamma)
{
    for (std::uint64_t n : {65535ull, 65536ull, 100000ull, 1ull << 30, 1ull << 40})
        EXPECT_NEAR(log_factorial(n), std::lgamma(static_cast<double>(n) + 1.0), 1e-9 * log_factorial(n)) << n;
}

TEST(LogChoose, MatchesExactBinomialCoefficients)
{
    std::mt19937_64 rng(2);
    for (int i = 0; i < 300; ++i) {
        const std::uint64_t n = rng() % 400;
        const std::uint64_t k = n ? rng() % (n + 1) : 0;
        const double exact = static_cast<double>(log(Big(choose_exact(n, k))));
        EXPECT_NEAR(log_choose(n, k), exact, 1e-10 * std::max(1.0, exact)) << n << " " << k;
    }
    // falling-factorial path for a large n and small k
    const double exact = static_cast<double>(log(Big(choose_exact(1'000'000, 37))));
    EXPECT_NEAR(log_choose(1'000'000, 37), exact, 1e-9 * exact);
}

TEST(GeometricGap, KnownShapes)
{
    const Pmf point = geometric_gap(1.0, 10);
    EXPECT_EQ(point.lo(), 0u);
    EXPECT_EQ(point.size(), 1u);

    const Pmf two = geometric_gap(0.5, 2);
    EXPECT_NEAR(two(0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(two(1), 1.0 / 3.0, 1e-15);

    const Pmf wide = geometric_gap(0.5, 200);
    for (std::uint64_t k = 0; k < 20; ++k)
        EXPECT_NEAR(wide(k), std::ldexp(1.0, -static_cast<int>(k) - 1), 1e-15);

    EXPECT_THROW(geometric_gap(0.0, 5), ContractError);
}

TEST(GapWithoutReplacement, MatchesExactProductFormula)
{
    EXPECT_NEAR(gap_without_replacement(1, 2)(0), 0.5, 1e-15);
    EXPECT_NEAR(gap_without_replacement(1, 2)(1), 0.5, 1e-15);
    EXPECT_NEAR(gap_without_replacement(2, 4)(1), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(gap_without_replacement(5, 5).size(), 1u);
    EXPECT_THROW(gap_without_replacement(6, 5), ContractError);

    for (std::uint64_t V = 1; V <= 40; ++V) {
        for (std::uint64_t n = 1; n <= V; ++n) {
            const Pmf p = gap_without_replacement(n, V);
            cpp_rational total = 0;
            for (std::uint64_t k = 0; k <= V - n; ++k) {
                cpp_rational prod = 1;
                for (std::uint64_t i = 0; i < k; ++i)
                    prod *= 1 - cpp_rational(n, V - i);
                prod *= cpp_rational(n, V - k);
                total += prod;
                ASSERT_NEAR(p(k), to_double(prod), 1e-13) << n << "/" << V << " k=" << k;
            }
            ASSERT_EQ(total, 1);
        }
    }
}

TEST(Hypergeometric, RootNodeSpotValue)
{
    const Pmf p = hypergeometric({6, 8, 3, std::nullopt});
    EXPECT_EQ(p.lo(), 3u);
    EXPECT_EQ(p.hi(), 6u);
    EXPECT_NEAR(p(5), 168.0 / 462.0, 1e-12);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
}

TEST(Hypergeometric, MatchesExactRationalsAndMean)
{
    for (std::uint64_t s = 1; s <= 25; ++s)
        for (std::uint64_t f = 0; f <= 25; ++f)
            for (std::uint64_t n = 0; n <= s + f; ++n) {
                const Pmf p = hypergeometric({n, s, f, std::nullopt});
                EXPECT_EQ(p.lo(), n > f ? n - f : 0);
                EXPECT_EQ(p.hi(), std::min(n, s));
                for (std::uint64_t m = p.lo(); m <= p.hi(); ++m)
                    ASSERT_NEAR(p(m), hypergeometric_exact(s, f, n, m), 1e-12) << s << "," << f << "," << n << "," << m;
                EXPECT_NEAR(p.mean(), static_cast<double>(n * s) / static_cast<double>(s + f), 1e-9);
            }
}

TEST(Hypergeometric, LargeContextIsNormalized)
{
    const Pmf p = hypergeometric({3000, 1u << 20, 1u << 20, std::nullopt});
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
    EXPECT_NEAR(p.mean(), 1500.0, 1e-6);
}

TEST(Binomial, SetSizePrior)
{
    const Pmf zero = binomial_set_size(9, 0.0);
    EXPECT_EQ(zero(0), 1.0);
    EXPECT_TRUE(std::isinf(zero.bits(1)));

    const Pmf two = binomial_set_size(2, 0.5);
    EXPECT_NEAR(two(0), 0.25, 1e-15);
    EXPECT_NEAR(two(1), 0.5, 1e-15);
    EXPECT_NEAR(two(2), 0.25, 1e-15);

    EXPECT_NEAR(binomial_set_size(11, 6.0 / 11.0).mean(), 6.0, 1e-9);
}

TEST(Binomial, MatchesExactRationals)
{
    for (std::uint64_t n = 0; n <= 60; ++n) {
        for (std::uint64_t num : {1u, 3u, 7u}) {
            const cpp_rational q(num, 8);
            const Pmf p = binomial(n, static_cast<double>(num) / 8.0);
            for (std::uint64_t m = 0; m <= n; ++m) {
                cpp_rational exact = cpp_rational(choose_exact(n, m));
                for (std::uint64_t i = 0; i < m; ++i)
                    exact *= q;
                for (std::uint64_t i = 0; i < n - m; ++i)
                    exact *= 1 - q;
                ASSERT_NEAR(p(m), to_double(exact), 1e-13) << n << " " << m;
            }
        }
    }
}

TEST(CaseExclusion, WorkedExample)
{
    const ExcludedCase ex = case_exclusion(4, {7, 5, 5, std::nullopt});
    EXPECT_EQ(ex.ctx.n_p, 3u);
    EXPECT_EQ(ex.ctx.s, 3u);
    EXPECT_EQ(ex.ctx.f, 3u);
    EXPECT_EQ(ex.shift, 2u);
    ASSERT_TRUE(ex.m);
    EXPECT_EQ(*ex.m, 2u);
}

TEST(CaseExclusion, IdentityWhenNothingIsExcluded)
{
    const NodeContext ctx{3, 5, 4, 0.3};
    const ExcludedCase ex = case_exclusion(1, ctx);
    EXPECT_EQ(ex.ctx, ctx);
    EXPECT_EQ(ex.shift, 0u);
    EXPECT_EQ(*ex.m, 1u);
}

TEST(CaseExclusion, FullNodeKeepsAValidContext)
{
    const ExcludedCase ex = case_exclusion(4, {10, 4, 6, 0.3});
    EXPECT_EQ(ex.ctx.n_p, 0u);
    EXPECT_EQ(ex.ctx.feasible_hi(), 0u);
    EXPECT_EQ(ex.shift, 4u);
    EXPECT_EQ(*ex.m, 0u);
    EXPECT_NO_THROW(ex.ctx.validate());
    EXPECT_DOUBLE_EQ(truncated_binomial(ex.ctx)(0), 1.0);
}

TEST(CaseExclusion, PreservesSupportWidthAndMapsOntoZeroToNp)
{
    std::mt19937_64 rng(8);
    for (int i = 0; i < 5000; ++i) {
        const std::uint64_t s = 1 + rng() % 50;
        const std::uint64_t f = rng() % 50;
        const std::uint64_t n = rng() % (s + f + 1);
        const NodeContext ctx{n, s, f, std::nullopt};
        const ExcludedCase ex = case_exclusion(std::nullopt, ctx);
        const std::uint64_t lo = ctx.feasible_lo();
        const std::uint64_t hi = ctx.feasible_hi();
        ASSERT_EQ(ex.shift, lo);
        ASSERT_EQ(ex.ctx.feasible_lo(), 0u);
        ASSERT_EQ(ex.ctx.feasible_hi(), ex.ctx.n_p);
        ASSERT_EQ(ex.ctx.n_p, hi - lo);
        ASSERT_LE(ex.ctx.n_p, std::min(ex.ctx.s, ex.ctx.f));
    }
}

TEST(TruncatedBinomial, ShapesAndPositivity)
{
    const Pmf half = truncated_binomial({2, 4, 4, 0.5});
    EXPECT_NEAR(half(0), 0.25, 1e-15);
    EXPECT_NEAR(half(1), 0.5, 1e-15);
    EXPECT_NEAR(half(2), 0.25, 1e-15);

    // worked exclusion example: support [0,3], plain Binomial(3, 1/2)
    const ExcludedCase ex = case_exclusion(std::nullopt, {7, 5, 5, 0.5});
    const Pmf p = truncated_binomial(ex.ctx);
    EXPECT_EQ(p.lo(), 0u);
    EXPECT_EQ(p.hi(), 3u);
    EXPECT_NEAR(p(0), 1.0 / 8, 1e-15);
    EXPECT_NEAR(p(1), 3.0 / 8, 1e-15);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);

    std::mt19937_64 rng(4);
    for (int i = 0; i < 2000; ++i) {
        const std::uint64_t s = 1 + rng() % 300;
        const std::uint64_t f = rng() % 300;
        const std::uint64_t n = rng() % (s + f + 1);
        const double q = (1.0 + static_cast<double>(rng() % 999)) / 1000.0;
        const ExcludedCase e = case_exclusion(std::nullopt, {n, s, f, q});
        const Pmf t = truncated_binomial(e.ctx);
        ASSERT_NEAR(t.sum(), 1.0, 1e-9);
        for (std::uint64_t m = t.lo(); m <= t.hi(); ++m)
            ASSERT_TRUE(std::isfinite(t.bits(m)));
    }
}

TEST(TruncatedBinomial, RenormalizesOverRestrictedRange)
{
    // without exclusion the feasible range of (n=5, s=3, f=4) is [1,3]
    const Pmf p = truncated_binomial({5, 3, 4, 0.4});
    EXPECT_EQ(p.lo(), 1u);
    EXPECT_EQ(p.hi(), 3u);
    double z = 0;
    for (int m = 1; m <= 3; ++m)
        z += static_cast<double>(choose_exact(5, m)) * std::pow(0.4, m) * std::pow(0.6, 5 - m);
    EXPECT_NEAR(p(2), 10 * 0.16 * 0.216 / z, 1e-14);
}

TEST(RescaleHypergeometric, WorkedCases)
{
    const NodeContext grown_f = rescale_hypergeometric({6, 8, 3, 0.35});
    EXPECT_EQ(grown_f.s, 8u);
    EXPECT_EQ(grown_f.f, 15u);

    const NodeContext grown_s = rescale_hypergeometric({3, 2, 8, 0.9});
    EXPECT_EQ(grown_s.s, 72u);
    EXPECT_EQ(grown_s.f, 8u);

    const NodeContext same = rescale_hypergeometric({3, 4, 6, 0.4});
    EXPECT_EQ(same.s, 4u);
    EXPECT_EQ(same.f, 6u);

    // f = 0 reads s/f as infinite
    const NodeContext from_zero = rescale_hypergeometric({2, 4, 0, 0.8});
    EXPECT_EQ(from_zero.s, 4u);
    EXPECT_EQ(from_zero.f, 1u);
}

TEST(RescaleHypergeometric, NeverShrinksAndTracksQ)
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 5000; ++i) {
        const std::uint64_t s = 1 + rng() % 1000;
        const std::uint64_t f = rng() % 1000;
        const double q = (1.0 + static_cast<double>(rng() % 999)) / 1000.0;
        const NodeContext r = rescale_hypergeometric({0, s, f, q});
        ASSERT_GE(r.s, s);
        ASSERT_GE(r.f, f);
        const double achieved = static_cast<double>(r.s) / static_cast<double>(r.s + r.f);
        // one unit of rounding on the grown side bounds the error
        ASSERT_NEAR(achieved, q, 1.0 / static_cast<double>(r.s + r.f) + 1e-12);
    }
}

TEST(Wallenius, CentralCaseIsHypergeometric)
{
    for (std::uint64_t s = 1; s <= 40; ++s)
        for (std::uint64_t f = 1; s + f <= 40; ++f)
            for (std::uint64_t n = 0; n <= s + f; n += 3) {
                const double q = static_cast<double>(s) / static_cast<double>(s + f);
                const Pmf w = wallenius({n, s, f, q});
                const Pmf h = hypergeometric({n, s, f, std::nullopt});
                ASSERT_EQ(w.lo(), h.lo());
                ASSERT_EQ(w.hi(), h.hi());
                for (std::uint64_t m = w.lo(); m <= w.hi(); ++m)
                    ASSERT_NEAR(w(m), h(m), 1e-6) << s << "," << f << "," << n << "," << m;
            }
}

TEST(Wallenius, MatchesBiasedUrnOracle)
{
    std::mt19937_64 rng(12);
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        const std::uint64_t s = 1 + rng() % 30;
        const std::uint64_t f = 1 + rng() % 30;
        const std::uint64_t n = rng() % (s + f + 1);
        const double q = (1.0 + static_cast<double>(rng() % 98)) / 100.0;
        const double w = static_cast<double>(f) / static_cast<double>(s) * q / (1 - q);
        const Pmf p = wallenius({n, s, f, q});
        const auto oracle = wallenius_urn(s, f, n, w);
        for (std::uint64_t m = p.lo(); m <= p.hi(); ++m)
            worst = std::max(worst, std::abs(p(m) - oracle[m]));
    }
    EXPECT_LT(worst, 1e-8);
}

TEST(Wallenius, NormalizationMeanShiftAndCutoff)
{
    const Pmf p = wallenius({6, 8, 3, 0.35});
    EXPECT_EQ(p.lo(), 3u);
    EXPECT_EQ(p.hi(), 6u);
    EXPECT_NEAR(p.sum(), 1.0, 1e-8);
    EXPECT_LT(p.mean(), 6.0 * 8.0 / 11.0);

    EXPECT_THROW(wallenius({10, 40, 30, 0.5}), UnsupportedSize);
    EXPECT_NO_THROW(wallenius({10, 40, 30, 0.5}, 70));
}
