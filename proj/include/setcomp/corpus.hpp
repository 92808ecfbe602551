#pragma once

// Dataset generators and the plain-text sets format:
//
//   # optional label
//   U=11
//   S 2 3 5 6 7 10
//   S
//
// Randomness comes from raw mt19937_64 outputs, which the standard fixes
// bit for bit; the std:: distributions are implementation-defined and would
// make datasets differ between standard libraries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "setcomp/error.hpp"
#include "setcomp/settree.hpp"

namespace setcomp {

struct Dataset {
    std::uint64_t universe = 1;
    std::vector<SetInstance> sets;
    std::string label;

    std::uint64_t total_elements() const
    {
        std::uint64_t n = 0;
        for (const auto& s : sets)
            n += s.size();
        return n;
    }
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform in [0, n), by rejection.
    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0)
            throw ContractError("Rng::below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do
            x = engine_();
        while (x >= limit);
        return x % n;
    }

    template <class T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

// Bit j of byte i becomes element 8i + j, most significant bit first.
inline Dataset gen_bit_sets(std::span<const std::uint8_t> bytes, unsigned group)
{
    if (group < 1 || group > 8)
        throw ContractError("group must be in 1..8");
    Dataset d;
    d.universe = 8 * group;
    d.label = "bits group=" + std::to_string(group);
    const std::size_t padded = (bytes.size() + group - 1) / group * group;
    if (padded != bytes.size())
        d.label += " padded=" + std::to_string(padded - bytes.size());
    for (std::size_t start = 0; start < padded; start += group) {
        std::vector<std::uint64_t> elems;
        for (unsigned i = 0; i < group; ++i) {
            const std::uint8_t b = start + i < bytes.size() ? bytes[start + i] : 0;
            for (unsigned j = 0; j < 8; ++j)
                if (b & (0x80u >> j))
                    elems.push_back(8 * i + j);
        }
        d.sets.emplace_back(d.universe, std::move(elems));
    }
    return d;
}

namespace detail {
inline Dataset bernoulli_subsets(std::uint64_t universe, std::span<const std::uint64_t> support, double density,
                                 std::size_t count, Rng& rng)
{
    Dataset d;
    d.universe = universe;
    d.sets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::uint64_t> elems;
        for (std::uint64_t x : support)
            if (rng.bernoulli(density))
                elems.push_back(x);
        d.sets.emplace_back(universe, std::move(elems));
    }
    return d;
}

inline void check_density(double density)
{
    if (!(density > 0.0 && density <= 1.0))
        throw ContractError("density must be in (0, 1]");
}
} // namespace detail

// Bernoulli(density) subsets of the multiples of k below U.
inline Dataset gen_multiples(std::uint64_t universe, std::uint64_t k, double density, std::size_t count,
                             std::uint64_t seed)
{
    if (universe < 1 || k < 1)
        throw ContractError("universe and k must be >= 1");
    detail::check_density(density);
    std::vector<std::uint64_t> support;
    for (std::uint64_t x = 0; x < universe; x += k)
        support.push_back(x);
    Rng rng(seed);
    Dataset d = detail::bernoulli_subsets(universe, support, density, count, rng);
    std::ostringstream label;
    label << "multiples U=" << universe << " k=" << k << " density=" << density << " count=" << count
          << " seed=" << seed;
    d.label = label.str();
    return d;
}

enum class SupportMode { random, prefix };

// Bernoulli(density) subsets of one fixed support: a uniform random subset of
// U (drawn once per dataset) or the prefix {0, ..., size-1}.
inline Dataset gen_support(std::uint64_t universe, std::uint64_t support_size, SupportMode mode, double density,
                           std::size_t count, std::uint64_t seed)
{
    if (universe < 1 || support_size > universe)
        throw ContractError("support size must not exceed the universe");
    detail::check_density(density);
    Rng rng(seed);
    std::vector<std::uint64_t> support(universe);
    for (std::uint64_t x = 0; x < universe; ++x)
        support[x] = x;
    if (mode == SupportMode::random) {
        // partial Fisher-Yates: the first support_size slots are the sample
        for (std::uint64_t i = 0; i < support_size; ++i)
            std::swap(support[i], support[i + rng.below(universe - i)]);
    }
    support.resize(support_size);
    std::sort(support.begin(), support.end());
    Dataset d = detail::bernoulli_subsets(universe, support, density, count, rng);
    std::ostringstream label;
    label << (mode == SupportMode::random ? "support" : "prefix") << " U=" << universe << " size=" << support_size
          << " density=" << density << " count=" << count << " seed=" << seed;
    d.label = label.str();
    return d;
}

// Inclusion probabilities min(1, c (x+1)^-s) with c chosen so that they sum
// to mean_size.
inline std::vector<double> zipf_inclusion(std::uint64_t universe, double s_exponent, double mean_size)
{
    if (!(s_exponent > 0.0))
        throw ContractError("zipf exponent must be > 0");
    if (!(mean_size > 0.0) || mean_size > static_cast<double>(universe))
        throw ContractError("mean size must be in (0, U]");
    std::vector<double> w(universe);
    for (std::uint64_t x = 0; x < universe; ++x)
        w[x] = std::pow(static_cast<double>(x + 1), -s_exponent);
    const auto expected = [&](double c) {
        double sum = 0.0;
        for (double v : w)
            sum += std::min(1.0, c * v);
        return sum;
    };
    std::vector<double> p(universe, 1.0);
    if (mean_size < static_cast<double>(universe)) {
        double lo = 0.0;
        double hi = 1.0 / w.back();  // every probability clipped to 1
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (expected(mid) < mean_size ? lo : hi) = mid;
        }
        const double c = 0.5 * (lo + hi);
        for (std::uint64_t x = 0; x < universe; ++x)
            p[x] = std::min(1.0, c * w[x]);
    }
    return p;
}

// Independent inclusion with Zipf-shaped probabilities. With `relabel`, the
// rank-to-element map is a random permutation so that frequency does not
// follow element order.
inline Dataset gen_zipf(std::uint64_t universe, double s_exponent, double mean_size, std::size_t count,
                        std::uint64_t seed, bool relabel = true)
{
    const std::vector<double> p = zipf_inclusion(universe, s_exponent, mean_size);
    std::vector<std::uint64_t> label_of(universe);
    for (std::uint64_t x = 0; x < universe; ++x)
        label_of[x] = x;
    if (relabel) {
        // separate stream: the relabeled dataset is exactly the plain one
        // with element ids mapped through label_of
        Rng relabel_rng(seed ^ 0x9E3779B97F4A7C15ull);
        relabel_rng.shuffle(label_of);
    }
    Rng rng(seed);
    Dataset d;
    d.universe = universe;
    d.sets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<std::uint64_t> elems;
        for (std::uint64_t x = 0; x < universe; ++x)
            if (rng.bernoulli(p[x]))
                elems.push_back(label_of[x]);
        d.sets.push_back(SetInstance::from_unsorted(universe, std::move(elems)));
    }
    std::ostringstream label;
    label << "zipf U=" << universe << " s=" << s_exponent << " mean=" << mean_size << " count=" << count
          << " seed=" << seed << (relabel ? " relabeled" : "");
    d.label = label.str();
    return d;
}

// ---- text format ----------------------------------------------------------

namespace detail {
inline std::uint64_t parse_u64(std::string_view tok, std::size_t line)
{
    if (tok.empty() || tok.size() > 20 || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw FormatError("line " + std::to_string(line) + ": bad integer '" + std::string(tok) + "'");
    std::uint64_t v = 0;
    for (char c : tok) {
        const std::uint64_t digit = static_cast<std::uint64_t>(c - '0');
        if (v > (UINT64_MAX - digit) / 10)
            throw FormatError("line " + std::to_string(line) + ": integer overflow");
        v = v * 10 + digit;
    }
    return v;
}

inline std::string_view trim(std::string_view s)
{
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && ws(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && ws(s.back()))
        s.remove_suffix(1);
    return s;
}
} // namespace detail

inline Dataset parse_sets(std::istream& in)
{
    Dataset d;
    bool have_universe = false;
    std::string raw;
    for (std::size_t line = 1; std::getline(in, raw); ++line) {
        const std::string_view text = detail::trim(raw);
        if (text.empty())
            continue;
        if (text.front() == '#') {
            if (d.label.empty() && !have_universe)
                d.label = std::string(detail::trim(text.substr(1)));
            continue;
        }
        const std::string where = "line " + std::to_string(line) + ": ";
        if (!have_universe) {
            if (text.substr(0, 2) != "U=")
                throw FormatError(where + "expected 'U=<integer>'");
            d.universe = detail::parse_u64(text.substr(2), line);
            if (d.universe < 1)
                throw FormatError(where + "universe must be >= 1");
            have_universe = true;
            continue;
        }
        if (text.front() != 'S' || (text.size() > 1 && text[1] != ' ' && text[1] != '\t'))
            throw FormatError(where + "expected 'S' line");
        std::vector<std::uint64_t> elems;
        std::istringstream toks{std::string(text.substr(1))};
        std::string tok;
        while (toks >> tok) {
            const std::uint64_t x = detail::parse_u64(tok, line);
            if (x >= d.universe)
                throw FormatError(where + "element " + tok + " outside universe");
            if (!elems.empty() && x <= elems.back())
                throw FormatError(where + "elements must be strictly ascending");
            elems.push_back(x);
        }
        d.sets.emplace_back(d.universe, std::move(elems));
    }
    if (!have_universe)
        throw FormatError("missing 'U=' line");
    return d;
}

inline void format_sets(std::ostream& out, const Dataset& d)
{
    if (!d.label.empty())
        out << "# " << d.label << '\n';
    out << "U=" << d.universe << '\n';
    for (const auto& s : d.sets) {
        out << 'S';
        for (std::uint64_t x : s.elements())
            out << ' ' << x;
        out << '\n';
    }
}

inline Dataset read_sets(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    return parse_sets(in);
}

inline void write_sets(const std::string& path, const Dataset& d)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path);
    format_sets(out, d);
    if (!out)
        throw Error("write failed: " + path);
}

} // namespace setcomp
