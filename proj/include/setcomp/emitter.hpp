#pragma once

// Emission layer between the codecs and the range coder. Every emission is
// "value x known to lie in [L, H]" plus a model for the values in that range,
// either an integer FreqTable (coded exactly) or a real-valued Pmf (ideal
// bits from the real probabilities, coded with its quantized table).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "setcomp/error.hpp"
#include "setcomp/pmf.hpp"
#include "setcomp/range_coder.hpp"

namespace setcomp {

struct Emission {
    std::uint64_t value;
    std::uint64_t lo;
    std::uint64_t hi;
    double bits;

    std::string str() const { return std::to_string(value) + "[" + std::to_string(lo) + "," + std::to_string(hi) + "]"; }
};

class SymbolWriter {
public:
    // With produce_payload = false nothing is quantized or coded; only ideal
    // bits are accumulated.
    explicit SymbolWriter(bool produce_payload = true, bool record_trace = false)
        : coder_(produce_payload ? std::optional<RangeEncoder>(std::in_place) : std::nullopt),
          record_trace_(record_trace)
    {
    }

    void emit(std::uint64_t value, const FreqTable& table)
    {
        if (!table.contains(value))
            throw ContractError(out_of_range(value, table.lo(), table.hi()));
        const double bits = table.width() == 1 ? 0.0 : table.bits(value);
        record(value, table.lo(), table.hi(), bits);
        if (coder_)
            coder_->emit(value, table);
    }

    void emit(std::uint64_t value, const Pmf& pmf)
    {
        if (value < pmf.lo() || value > pmf.hi())
            throw ContractError(out_of_range(value, pmf.lo(), pmf.hi()));
        if (pmf.size() == 1) {
            record(value, value, value, 0.0);
            return;
        }
        const double bits = pmf.bits(value);
        if (!std::isfinite(bits))
            throw ModelContradiction("emitted value " + std::to_string(value) + " has zero probability");
        record(value, pmf.lo(), pmf.hi(), bits);
        if (coder_)
            coder_->emit(value, quantize(pmf));
    }

    void emit_uniform(std::uint64_t value, std::uint64_t lo, std::uint64_t hi)
    {
        if (lo == hi) {
            if (value != lo)
                throw ContractError(out_of_range(value, lo, hi));
            record(value, lo, hi, 0.0);
            return;
        }
        emit(value, FreqTable::uniform(lo, hi));
    }

    // Marks the end of the set-size emission; bits before it are reported
    // separately from the element bits.
    void mark_size_end() { size_bits_ = ideal_bits_; }

    double ideal_bits() const noexcept { return ideal_bits_; }
    double size_bits() const noexcept { return size_bits_; }
    double element_bits() const noexcept { return ideal_bits_ - size_bits_; }
    std::size_t emissions() const noexcept { return emissions_; }
    const std::vector<Emission>& trace() const noexcept { return trace_; }
    bool produces_payload() const noexcept { return coder_.has_value(); }

    std::vector<std::uint8_t> finish()
    {
        if (!coder_)
            return {};
        return coder_->finish();
    }

private:
    static std::string out_of_range(std::uint64_t v, std::uint64_t lo, std::uint64_t hi)
    {
        return "emit: value " + std::to_string(v) + " outside [" + std::to_string(lo) + "," + std::to_string(hi) + "]";
    }

    void record(std::uint64_t value, std::uint64_t lo, std::uint64_t hi, double bits)
    {
        ideal_bits_ += bits;
        ++emissions_;
        if (record_trace_)
            trace_.push_back({value, lo, hi, bits});
    }

    std::optional<RangeEncoder> coder_;
    bool record_trace_;
    double ideal_bits_ = 0.0;
    double size_bits_ = 0.0;
    std::size_t emissions_ = 0;
    std::vector<Emission> trace_;
};

class SymbolReader {
public:
    explicit SymbolReader(std::span<const std::uint8_t> payload) : decoder_(payload), size_(payload.size()) {}

    std::uint64_t read(const FreqTable& table) { return decoder_.read(table); }

    std::uint64_t read(const Pmf& pmf)
    {
        if (pmf.size() == 1)
            return pmf.lo();
        return decoder_.read(quantize(pmf));
    }

    std::uint64_t read_uniform(std::uint64_t lo, std::uint64_t hi)
    {
        if (lo == hi)
            return lo;
        return decoder_.read(FreqTable::uniform(lo, hi));
    }

    // Every payload byte must have been consumed by the end of a decode.
    void expect_end() const
    {
        if (decoder_.consumed() != size_)
            throw FormatError("trailing bytes after payload");
    }

private:
    RangeDecoder decoder_;
    std::size_t size_;
};

} // namespace setcomp
