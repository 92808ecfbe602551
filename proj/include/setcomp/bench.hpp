#pragma once

// Benchmark matrix: every requested codec over one dataset, one row each.
// bits_per_element leaves out the |S| emission (yesno has none), so
// small-set figures stay comparable across codecs.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "setcomp/codecs.hpp"
#include "setcomp/corpus.hpp"
#include "setcomp/stats.hpp"

namespace setcomp {

struct BenchRow {
    std::string dataset;
    std::string codec;
    bool permuted = false;
    std::size_t sets = 0;
    std::uint64_t elements = 0;
    double ideal_bits = 0.0;        // excluding |S| (except yesno)
    std::uint64_t actual_bits = 0;  // whole payloads; 0 with ideal_only
    double bits_per_element = 0.0;
};

struct BenchOptions {
    std::vector<CodecId> codecs;
    bool permuted = false;
    bool robust = true;
    std::optional<double> yesno_p;  // global probability for yesno
    bool ideal_only = false;        // no payloads built
    bool per_element_actual = false; // bits_per_element from actual_bits
    unsigned threads = 1;
};

namespace detail {
struct SetCost {
    double bits = 0.0;
    std::uint64_t actual = 0;
};

// Runs fn(i) for i in [0, n) on up to `threads` workers; rethrows the first
// failure.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn)
{
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < n; i += threads)
                    fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    }
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}
} // namespace detail

inline BenchRow bench_codec(const Dataset& data, CodecId id, const BenchOptions& opt, const CounterModel* model)
{
    CodecOptions co;
    co.permuted = opt.permuted;
    co.robust = opt.robust;
    if (id == CodecId::yesno)
        co.p_global = opt.yesno_p;
    const SetCodec codec(id, co, model);

    std::vector<detail::SetCost> cost(data.sets.size());
    detail::parallel_for(data.sets.size(), opt.threads, [&](std::size_t i) {
        EncodeStats st;
        if (opt.ideal_only)
            st = codec.measure(data.sets[i]);
        else
            codec.encode(data.sets[i], &st);
        cost[i] = {st.element_bits(), st.actual_bits};
    });

    BenchRow row;
    row.dataset = data.label;
    row.codec = std::string(codec_name(id));
    row.permuted = opt.permuted;
    row.sets = data.sets.size();
    row.elements = data.total_elements();
    // summed in input order so totals do not depend on the thread count
    for (const auto& c : cost) {
        row.ideal_bits += c.bits;
        row.actual_bits += c.actual;
    }
    const double denom = static_cast<double>(std::max<std::uint64_t>(row.elements, 1));
    row.bits_per_element =
        (opt.per_element_actual ? static_cast<double>(row.actual_bits) : row.ideal_bits) / denom;
    return row;
}

// `model` may be null when no requested codec needs one.
inline std::vector<BenchRow> run_bench(const Dataset& data, const BenchOptions& opt, const CounterModel* model)
{
    if (model)
        model->finalize();
    std::vector<BenchRow> rows;
    for (CodecId id : opt.codecs)
        rows.push_back(bench_codec(data, id, opt, model));
    return rows;
}

inline void write_csv_header(std::ostream& out)
{
    out << "dataset,codec,permuted,sets,elements,ideal_bits,actual_bits,bits_per_element\n";
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

inline void write_csv_row(std::ostream& out, const BenchRow& r)
{
    char num[128];
    out << csv_field(r.dataset) << ',' << r.codec << ',' << (r.permuted ? 1 : 0) << ',' << r.sets << ','
        << r.elements << ',';
    std::snprintf(num, sizeof num, "%.6f,%llu,%.6f", r.ideal_bits, static_cast<unsigned long long>(r.actual_bits),
                  r.bits_per_element);
    out << num << '\n';
}

} // namespace setcomp
