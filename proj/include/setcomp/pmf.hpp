#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "setcomp/error.hpp"
#include "setcomp/range_coder.hpp"

namespace setcomp {

// Finite discrete distribution over the integer range [lo, lo + probs.size() - 1].
class Pmf {
public:
    Pmf() = default;
    Pmf(std::uint64_t lo, std::vector<double> probs) : lo_(lo), probs_(std::move(probs))
    {
        if (probs_.empty())
            throw ContractError("pmf needs a non-empty support");
    }

    static Pmf point(std::uint64_t value) { return Pmf(value, {1.0}); }

    // Builds a normalized pmf from unnormalized natural-log masses. The
    // normalized logs are kept so that far-tail values whose probability
    // underflows a double still get a finite, exact codelength.
    static Pmf from_log(std::uint64_t lo, std::vector<double> log_mass)
    {
        const double peak = *std::max_element(log_mass.begin(), log_mass.end());
        std::vector<double> p(log_mass.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = std::exp(log_mass[i] - peak);
            sum += p[i];
        }
        for (double& x : p)
            x /= sum;
        const double log_norm = peak + std::log(sum);
        for (double& x : log_mass)
            x -= log_norm;
        Pmf out(lo, std::move(p));
        out.log_probs_ = std::move(log_mass);
        return out;
    }

    std::uint64_t lo() const noexcept { return lo_; }
    std::uint64_t hi() const noexcept { return lo_ + probs_.size() - 1; }
    std::size_t size() const noexcept { return probs_.size(); }
    const std::vector<double>& probs() const noexcept { return probs_; }

    double operator()(std::uint64_t value) const noexcept
    {
        return value < lo_ || value > hi() ? 0.0 : probs_[value - lo_];
    }

    // -log2 P(value); +inf for a value of probability exactly zero.
    double bits(std::uint64_t value) const
    {
        if (value < lo_ || value > hi())
            return std::numeric_limits<double>::infinity();
        if (!log_probs_.empty())
            return -log_probs_[value - lo_] / std::numbers::ln2;
        return -std::log2(probs_[value - lo_]);
    }

    double sum() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

    double mean() const
    {
        double m = 0.0;
        for (std::size_t i = 0; i < probs_.size(); ++i)
            m += probs_[i] * static_cast<double>(lo_ + i);
        return m;
    }

    Pmf shifted(std::uint64_t offset) const
    {
        Pmf out = *this;
        out.lo_ += offset;
        return out;
    }

private:
    std::uint64_t lo_ = 0;
    std::vector<double> probs_{1.0};
    std::vector<double> log_probs_;
};

// Total used when quantizing a pmf of the given width: 2^16 for narrow
// ranges, growing so that the weight-1 floor can claim at most 2^-12 of the
// mass, capped at 2^32.
inline std::uint64_t quantization_total(std::uint64_t width)
{
    constexpr std::uint64_t base = std::uint64_t(1) << 16;
    if (width > (kMaxTableTotal >> 12))
        return kMaxTableTotal;
    return std::max(base, std::bit_ceil(width) << 12);
}

// Scales a pmf to integer weights with an exact total, every value getting
// weight >= 1, using largest-remainder rounding.
inline FreqTable quantize(const Pmf& pmf)
{
    const std::size_t n = pmf.size();
    const std::uint64_t total = quantization_total(n);
    const auto& p = pmf.probs();
    const double mass = pmf.sum();

    std::vector<std::uint32_t> w(n);
    std::vector<double> rem(n);
    std::uint64_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double raw = p[i] / mass * static_cast<double>(total);
        const double fl = std::floor(raw);
        w[i] = static_cast<std::uint32_t>(std::max(1.0, std::min(fl, 4294967295.0)));
        rem[i] = raw - fl;
        assigned += w[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t(0));
    if (assigned < total) {
        // hand out the deficit to the largest remainders
        std::uint64_t deficit = total - assigned;
        const auto by_rem_desc = [&](std::size_t a, std::size_t b) {
            return rem[a] > rem[b] || (rem[a] == rem[b] && a < b);
        };
        while (deficit > 0) {
            const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(deficit, n));
            if (take < n)
                std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                                 by_rem_desc);
            for (std::size_t i = 0; i < take; ++i)
                ++w[order[i]];
            deficit -= take;
        }
    } else if (assigned > total) {
        // the weight-1 floor overshot: take units back from the smallest
        // remainders among values that can spare one
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return rem[a] < rem[b] || (rem[a] == rem[b] && a < b);
        });
        std::uint64_t excess = assigned - total;
        while (excess > 0) {
            bool progressed = false;
            for (std::size_t i = 0; i < n && excess > 0; ++i) {
                if (w[order[i]] > 1) {
                    --w[order[i]];
                    --excess;
                    progressed = true;
                }
            }
            if (!progressed)
                throw ContractError("pmf too wide to quantize");
        }
    }
    return FreqTable::from_weights(pmf.lo(), std::move(w));
}

} // namespace setcomp
