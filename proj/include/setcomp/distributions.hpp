#pragma once

// Probability mass functions used by the set codecs: gap laws, hypergeometric
// and binomial subset-size laws, the statistical adjustments applied to them,
// and Wallenius' noncentral hypergeometric distribution.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "setcomp/error.hpp"
#include "setcomp/pmf.hpp"

namespace setcomp {

namespace detail {

inline constexpr std::size_t kLogFactorialTableSize = std::size_t(1) << 16;

inline const std::vector<double>& log_factorial_table()
{
    static const std::vector<double> table = [] {
        std::vector<double> t(kLogFactorialTableSize);
        long double acc = 0.0L;
        t[0] = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) {
            acc += std::log(static_cast<long double>(i));
            t[i] = static_cast<double>(acc);
        }
        return t;
    }();
    return table;
}

} // namespace detail

// ln(n!) from a table below 2^16, Stirling's series above.
inline double log_factorial(std::uint64_t n)
{
    if (n < detail::kLogFactorialTableSize)
        return detail::log_factorial_table()[n];
    const double x = static_cast<double>(n);
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    constexpr double half_log_2pi = 0.91893853320467274178;
    return (x + 0.5) * std::log(x) - x + half_log_2pi +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

// ln C(n, k); for a huge n and modest k the falling factorial is summed
// directly to avoid cancellation between two large Stirling values.
inline double log_choose(std::uint64_t n, std::uint64_t k)
{
    if (k > n)
        throw ContractError("log_choose: k > n");
    k = std::min(k, n - k);
    if (n >= detail::kLogFactorialTableSize && k <= 4096) {
        double acc = 0.0;
        for (std::uint64_t i = 0; i < k; ++i)
            acc += std::log(static_cast<double>(n - i)) - std::log(static_cast<double>(i + 1));
        return acc;
    }
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Parent/child context for a subset-size emission: n_p elements of the
// parent fall into a left subuniverse of size s and a right one of size f.
struct NodeContext {
    std::uint64_t n_p = 0;
    std::uint64_t s = 1;
    std::uint64_t f = 0;
    std::optional<double> q;

    void validate() const
    {
        if (s < 1 || n_p > s + f)
            throw ContractError("invalid node context");
        if (q && !(*q >= 0.0 && *q <= 1.0))
            throw ContractError("q outside [0,1]");
    }

    std::uint64_t feasible_lo() const { return n_p > f ? n_p - f : 0; }
    std::uint64_t feasible_hi() const { return std::min(n_p, s); }

    friend bool operator==(const NodeContext&, const NodeContext&) = default;
};

// Geometric law of the number of skipped slots k before the next element,
// truncated to k in [0, V-1] and renormalized.
inline Pmf geometric_gap(double p, std::uint64_t V)
{
    if (!(p > 0.0 && p <= 1.0))
        throw ContractError("geometric_gap: p must lie in (0, 1]");
    if (V < 1)
        throw ContractError("geometric_gap: V must be >= 1");
    if (p == 1.0)
        return Pmf::point(0);
    const double log_miss = std::log1p(-p);
    std::vector<double> lm(V);
    for (std::uint64_t k = 0; k < V; ++k)
        lm[k] = static_cast<double>(k) * log_miss;
    return Pmf::from_log(0, lm);
}

// Exact gap law for drawing without replacement: n elements remain to be
// placed among V slots.
inline Pmf gap_without_replacement(std::uint64_t n, std::uint64_t V)
{
    if (n < 1 || n > V)
        throw ContractError("gap_without_replacement: need 1 <= n <= V");
    const std::uint64_t kmax = V - n;
    // prod_{i<k} (1 - n/(V-i)) * n/(V-k), accumulated in log space
    std::vector<double> lm(kmax + 1);
    const double nd = static_cast<double>(n);
    double log_survive = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        const double remaining = static_cast<double>(V - k);
        lm[k] = log_survive + std::log(nd / remaining);
        if (k < kmax)
            log_survive += std::log1p(-nd / remaining);
    }
    return Pmf::from_log(0, std::move(lm));
}

// Central hypergeometric law of n_t over its feasible range.
inline Pmf hypergeometric(const NodeContext& ctx)
{
    ctx.validate();
    const std::uint64_t lo = ctx.feasible_lo();
    const std::uint64_t hi = ctx.feasible_hi();
    if (lo == hi)
        return Pmf::point(lo);
    // log-mass at lo, then the ratio recurrence
    // P(m+1)/P(m) = (s-m)(n-m) / ((m+1)(f-n+m+1))
    std::vector<double> lm(hi - lo + 1);
    lm[0] = log_choose(ctx.s, lo) + log_choose(ctx.f, ctx.n_p - lo) - log_choose(ctx.s + ctx.f, ctx.n_p);
    for (std::uint64_t m = lo; m < hi; ++m) {
        const double num = static_cast<double>(ctx.s - m) * static_cast<double>(ctx.n_p - m);
        const double den = static_cast<double>(m + 1) * static_cast<double>(ctx.f + m + 1 - ctx.n_p);
        lm[m - lo + 1] = lm[m - lo] + std::log(num / den);
    }
    return Pmf::from_log(lo, lm);
}

namespace detail {
// Unnormalized ln Binomial(n, p) masses for m in [lo, hi] via the ratio
// P(m+1)/P(m) = (n-m)/(m+1) * p/(1-p).
inline std::vector<double> binomial_log_mass(std::uint64_t n, double lp, double lq, std::uint64_t lo,
                                             std::uint64_t hi)
{
    std::vector<double> lm(hi - lo + 1);
    lm[0] = log_choose(n, lo) + static_cast<double>(lo) * lp + static_cast<double>(n - lo) * lq;
    for (std::uint64_t m = lo; m < hi; ++m)
        lm[m - lo + 1] = lm[m - lo] + std::log(static_cast<double>(n - m) / static_cast<double>(m + 1)) + lp - lq;
    return lm;
}
} // namespace detail

// Binomial(n, p) over [0, n].
inline Pmf binomial(std::uint64_t n, double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ContractError("binomial: p outside [0,1]");
    if (p == 0.0)
        return Pmf(0, [&] { std::vector<double> v(n + 1, 0.0); v[0] = 1.0; return v; }());
    if (p == 1.0)
        return Pmf(0, [&] { std::vector<double> v(n + 1, 0.0); v[n] = 1.0; return v; }());
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    return Pmf::from_log(0, detail::binomial_log_mass(n, lp, lq, 0, n));
}

// Prior on |S| for a universe of the given size and element probability p.
inline Pmf binomial_set_size(std::uint64_t universe, double p) { return binomial(universe, p); }

struct ExcludedCase {
    NodeContext ctx;            // n_p <= min(s, f) afterwards
    std::optional<std::uint64_t> m;
    std::uint64_t shift = 0;    // original m = excluded m + shift
};

// Removes the structurally impossible subset sizes so that the feasible
// range becomes exactly [0, n_p].
inline ExcludedCase case_exclusion(std::optional<std::uint64_t> m, NodeContext ctx)
{
    ctx.validate();
    std::uint64_t shift = 0;
    if (ctx.n_p > ctx.s) {
        const std::uint64_t d = ctx.n_p - ctx.s;
        ctx.n_p = ctx.s;
        ctx.f -= d;
    }
    if (ctx.n_p > ctx.f) {
        const std::uint64_t d = ctx.n_p - ctx.f;
        if (m) {
            if (*m < d)
                throw ContractError("case_exclusion: m outside the feasible range");
            *m -= d;
        }
        shift = d;
        ctx.n_p = ctx.f;
        // a full node (n_p = s + f) would reach s = 0; its range [0, 0] is
        // the same with s = 1, which keeps the context valid
        ctx.s = std::max<std::uint64_t>(ctx.s - d, 1);
    }
    return {ctx, m, shift};
}

// Binomial(n_p, q) restricted to the feasible range of ctx and renormalized.
// After case_exclusion that range is all of [0, n_p].
inline Pmf truncated_binomial(const NodeContext& ctx)
{
    ctx.validate();
    if (!ctx.q || !(*ctx.q > 0.0 && *ctx.q < 1.0))
        throw ContractError("truncated_binomial: q must lie in (0,1)");
    const std::uint64_t lo = ctx.feasible_lo();
    const std::uint64_t hi = ctx.feasible_hi();
    const double lp = std::log(*ctx.q);
    const double lq = std::log1p(-*ctx.q);
    return Pmf::from_log(lo, detail::binomial_log_mass(ctx.n_p, lp, lq, lo, hi));
}

namespace detail {
inline std::uint64_t round_half_up(double x)
{
    return static_cast<std::uint64_t>(std::floor(x + 0.5));
}
} // namespace detail

// Linearly grows s or f so that s / (s + f) approximates q.
inline NodeContext rescale_hypergeometric(NodeContext ctx)
{
    ctx.validate();
    if (!ctx.q || !(*ctx.q > 0.0 && *ctx.q < 1.0))
        throw ContractError("rescale_hypergeometric: q must lie in (0,1)");
    const double q = *ctx.q;
    const double s = static_cast<double>(ctx.s);
    const double f = static_cast<double>(ctx.f);
    // s/f >= q/(1-q), with f = 0 read as s/f = +inf
    if (s * (1.0 - q) >= f * q)
        ctx.f = detail::round_half_up(s * (1.0 - q) / q);
    else
        ctx.s = detail::round_half_up(f * q / (1.0 - q));
    return ctx;
}

inline constexpr std::uint64_t kDefaultWalleniusCutoff = 64;

namespace detail {
// Double-exponential quadrature copes with the t^(w/D) endpoint behaviour
// that stalls Gauss-Kronrod bisection. One per thread: integrate() is not
// const in every Boost release.
inline boost::math::quadrature::tanh_sinh<double>& wallenius_integrator()
{
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator;
}
} // namespace detail

// Wallenius' noncentral hypergeometric law of n_t with bias
// w = (f / s) * q / (1 - q), from its integral representation
//   P(m) = C(s,m) C(f,n-m) * int_0^1 (1 - t^(w/D))^m (1 - t^(1/D))^(n-m) dt,
//   D = w (s - m) + (f - n + m).
inline Pmf wallenius(const NodeContext& ctx, std::uint64_t cutoff = kDefaultWalleniusCutoff)
{
    ctx.validate();
    if (ctx.s + ctx.f > cutoff)
        throw UnsupportedSize("wallenius: population " + std::to_string(ctx.s + ctx.f) +
                              " exceeds cutoff " + std::to_string(cutoff));
    if (!ctx.q || !(*ctx.q > 0.0 && *ctx.q < 1.0))
        throw ContractError("wallenius: q must lie in (0,1)");
    const std::uint64_t lo = ctx.feasible_lo();
    const std::uint64_t hi = ctx.feasible_hi();
    if (lo == hi)
        return Pmf::point(lo);

    const double q = *ctx.q;
    const double w = static_cast<double>(ctx.f) / static_cast<double>(ctx.s) * q / (1.0 - q);
    std::vector<double> p(hi - lo + 1);
    for (std::uint64_t m = lo; m <= hi; ++m) {
        const double md = static_cast<double>(m);
        const double rest = static_cast<double>(ctx.n_p - m);
        const double D = w * static_cast<double>(ctx.s - m) + static_cast<double>(ctx.f - (ctx.n_p - m));
        const double a = w / D;
        const double b = 1.0 / D;
        auto integrand = [=](double t) {
            if (t <= 0.0)
                return 1.0;
            if (t >= 1.0)
                return 0.0;
            const double lt = std::log(t);
            // 1 - t^x computed as -expm1(x ln t) to keep precision near t = 1
            double v = 0.0;
            if (md > 0.0)
                v += md * std::log(-std::expm1(a * lt));
            if (rest > 0.0)
                v += rest * std::log(-std::expm1(b * lt));
            return std::exp(v);
        };
        const double integral = detail::wallenius_integrator().integrate(integrand, 0.0, 1.0, 1e-12);
        const double coef = std::exp(log_choose(ctx.s, m) + log_choose(ctx.f, ctx.n_p - m));
        p[m - lo] = coef * integral;
    }
    double sum = 0.0;
    for (double x : p)
        sum += x;
    for (double& x : p)
        x /= sum;
    return Pmf(lo, std::move(p));
}

} // namespace setcomp
