#pragma once

// Integer range coder (64-bit low/range, byte-wise renormalization with carry
// propagation) driven by integer frequency tables with totals up to 2^32.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "setcomp/error.hpp"

namespace setcomp {

inline constexpr std::uint64_t kMaxTableTotal = std::uint64_t(1) << 32;

// Frequency table over the contiguous value range [lo, hi]. Three shapes are
// computed analytically (no per-value storage), which keeps emissions over a
// whole large universe cheap.
class FreqTable {
public:
    enum class Shape : std::uint8_t { weights, uniform, low_short, high_short };

    static FreqTable uniform(std::uint64_t lo, std::uint64_t hi)
    {
        FreqTable t(Shape::uniform, lo, hi);
        t.total_ = t.width();
        t.check_total();
        return t;
    }

    // Truncated (minimal) binary code over [lo, hi] as dyadic weights: the
    // u = 2^k - r shortest codewords get weight 2, the rest weight 1, total
    // 2^k. Low-short favours the smallest values, high-short the largest.
    static FreqTable truncated_binary(std::uint64_t lo, std::uint64_t hi, bool low_short)
    {
        FreqTable t(low_short ? Shape::low_short : Shape::high_short, lo, hi);
        const std::uint64_t r = t.width();
        if (r > kMaxTableTotal)
            throw ContractError("truncated binary range wider than 2^32");
        t.total_ = std::bit_ceil(r);
        t.short_count_ = t.total_ - r;
        return t;
    }

    static FreqTable from_weights(std::uint64_t lo, std::vector<std::uint32_t> weights)
    {
        if (weights.empty())
            throw ContractError("frequency table needs at least one value");
        FreqTable t(Shape::weights, lo, lo + weights.size() - 1);
        t.cum_.resize(weights.size() + 1);
        std::uint64_t acc = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] == 0)
                throw ContractError("frequency table weight must be >= 1");
            t.cum_[i] = acc;
            acc += weights[i];
        }
        t.cum_.back() = acc;
        t.total_ = acc;
        t.weights_ = std::move(weights);
        t.check_total();
        return t;
    }

    Shape shape() const noexcept { return shape_; }
    std::uint64_t lo() const noexcept { return lo_; }
    std::uint64_t hi() const noexcept { return hi_; }
    std::uint64_t width() const noexcept { return hi_ - lo_ + 1; }
    std::uint64_t total() const noexcept { return total_; }
    bool contains(std::uint64_t v) const noexcept { return v >= lo_ && v <= hi_; }

    std::uint64_t freq(std::uint64_t value) const
    {
        const std::uint64_t i = value - lo_;
        switch (shape_) {
        case Shape::weights: return weights_[i];
        case Shape::uniform: return 1;
        case Shape::low_short: return i < short_count_ ? 2 : 1;
        case Shape::high_short: return i >= width() - short_count_ ? 2 : 1;
        }
        return 0;
    }

    // Sum of the weights of all values below `value`.
    std::uint64_t cum(std::uint64_t value) const
    {
        const std::uint64_t i = value - lo_;
        switch (shape_) {
        case Shape::weights: return cum_[i];
        case Shape::uniform: return i;
        case Shape::low_short: return i + std::min(i, short_count_);
        case Shape::high_short: {
            const std::uint64_t first_short = width() - short_count_;
            return i + (i > first_short ? i - first_short : 0);
        }
        }
        return 0;
    }

    // The value v with cum(v) <= target < cum(v) + freq(v).
    std::uint64_t find(std::uint64_t target) const
    {
        switch (shape_) {
        case Shape::weights: {
            auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
            return lo_ + static_cast<std::uint64_t>(it - cum_.begin()) - 1;
        }
        case Shape::uniform: return lo_ + target;
        case Shape::low_short:
            return lo_ + (target < 2 * short_count_ ? target / 2 : target - short_count_);
        case Shape::high_short: {
            const std::uint64_t first_short = width() - short_count_;
            return lo_ + (target < first_short ? target : first_short + (target - first_short) / 2);
        }
        }
        return lo_;
    }

    double bits(std::uint64_t value) const
    {
        return std::log2(static_cast<double>(total_)) - std::log2(static_cast<double>(freq(value)));
    }

private:
    FreqTable(Shape shape, std::uint64_t lo, std::uint64_t hi) : shape_(shape), lo_(lo), hi_(hi)
    {
        if (hi < lo)
            throw ContractError("frequency table with hi < lo");
    }

    void check_total() const
    {
        if (total_ > kMaxTableTotal)
            throw ContractError("frequency table total exceeds 2^32");
    }

    Shape shape_;
    std::uint64_t lo_;
    std::uint64_t hi_;
    std::uint64_t total_ = 0;
    std::uint64_t short_count_ = 0;
    std::vector<std::uint32_t> weights_;
    std::vector<std::uint64_t> cum_;
};

struct CodeStats {
    double ideal_bits = 0.0;        // sum of -log2 p over emissions
    std::uint64_t actual_bits = 0;  // payload bytes * 8, set by finish()
};

namespace detail {
inline constexpr unsigned kWindowBits = 56;
inline constexpr std::uint64_t kWindowMask = (std::uint64_t(1) << kWindowBits) - 1;
inline constexpr std::uint64_t kRangeFloor = std::uint64_t(1) << (kWindowBits - 8);
inline constexpr unsigned kWindowBytes = kWindowBits / 8;
} // namespace detail

// Invariants between calls: range in [2^48, 2^56), low < 2^56 (plus a carry
// bit transiently). A finished payload is exactly (#renormalizations + 7)
// bytes, which is also what the decoder consumes, so any truncation is
// detected.
class RangeEncoder {
public:
    void emit(std::uint64_t value, const FreqTable& table)
    {
        if (!table.contains(value))
            throw ContractError("emit: value " + std::to_string(value) + " outside [" +
                                std::to_string(table.lo()) + "," + std::to_string(table.hi()) + "]");
        if (table.width() == 1)
            return;
        stats_.ideal_bits += table.bits(value);
        encode_interval(table.cum(value), table.freq(value), table.total());
    }

    std::vector<std::uint8_t> finish()
    {
        for (unsigned i = 0; i <= detail::kWindowBytes; ++i)
            shift_low();
        stats_.actual_bits = out_.size() * 8;
        return std::move(out_);
    }

    const CodeStats& stats() const noexcept { return stats_; }

private:
    void encode_interval(std::uint64_t start, std::uint64_t size, std::uint64_t total)
    {
        const std::uint64_t r = range_ / total;
        low_ += r * start;
        range_ = r * size;
        while (range_ < detail::kRangeFloor) {
            range_ <<= 8;
            shift_low();
        }
    }

    void shift_low()
    {
        const std::uint64_t top = low_ >> (detail::kWindowBits - 8);
        if (top != 0xFF) {
            // top > 0xFF means a carry out of the window
            const auto carry = static_cast<std::uint8_t>(top >> 8);
            if (has_cache_)
                out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
            for (; pending_ff_ > 0; --pending_ff_)
                out_.push_back(static_cast<std::uint8_t>(0xFF + carry));
            cache_ = static_cast<std::uint8_t>(top & 0xFF);
            has_cache_ = true;
        } else {
            ++pending_ff_;
        }
        low_ = (low_ << 8) & detail::kWindowMask;
    }

    std::uint64_t low_ = 0;
    std::uint64_t range_ = detail::kWindowMask;
    std::uint8_t cache_ = 0;
    bool has_cache_ = false;
    std::uint64_t pending_ff_ = 0;
    std::vector<std::uint8_t> out_;
    CodeStats stats_;
};

class RangeDecoder {
public:
    explicit RangeDecoder(std::span<const std::uint8_t> payload) : in_(payload)
    {
        for (unsigned i = 0; i < detail::kWindowBytes; ++i)
            code_ = (code_ << 8) | next_byte();
    }

    std::uint64_t read(const FreqTable& table)
    {
        if (table.width() == 1)
            return table.lo();
        const std::uint64_t r = range_ / table.total();
        const std::uint64_t target = code_ / r;
        if (target >= table.total())
            throw FormatError("corrupt payload: code outside table range");
        const std::uint64_t value = table.find(target);
        code_ -= r * table.cum(value);
        range_ = r * table.freq(value);
        while (range_ < detail::kRangeFloor) {
            range_ <<= 8;
            code_ = (code_ << 8) | next_byte();
        }
        return value;
    }

    std::size_t consumed() const noexcept { return pos_; }

private:
    std::uint8_t next_byte()
    {
        if (pos_ >= in_.size())
            throw StreamExhausted();
        return in_[pos_++];
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    std::uint64_t code_ = 0;
    std::uint64_t range_ = detail::kWindowMask;
};

} // namespace setcomp
