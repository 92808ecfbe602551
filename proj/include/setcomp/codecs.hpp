#pragma once

// The set codecs. Every codec maps a SetInstance to a sequence of emissions
// (see emitter.hpp) and back:
//
//   gap, gap-wor        gaps between sorted elements, geometric or exact
//                       without-replacement law
//   yesno               one included/not-included emission per universe element
//   interp, tournament  range-narrowing codes with minimal binary codewords
//   rss-*               recursive subset sizes over the universe tree with a
//                       flat, hypergeometric, binomial, rescaled hypergeometric
//                       or Wallenius model per node
//
// All codecs but yesno start with |S| emitted over [0, |U|].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setcomp/distributions.hpp"
#include "setcomp/emitter.hpp"
#include "setcomp/error.hpp"
#include "setcomp/settree.hpp"
#include "setcomp/stats.hpp"
#include "setcomp/wire.hpp"

namespace setcomp {

enum class CodecId : std::uint8_t {
    gap = 0,
    gap_wor = 1,
    yesno = 2,
    interp = 3,
    tournament = 4,
    rss_flat = 5,
    rss_hg = 6,
    rss_binom = 7,
    rss_rhg = 8,
    rss_nchg = 9,
};

inline constexpr std::array<CodecId, 10> kAllCodecs = {
    CodecId::gap,        CodecId::gap_wor, CodecId::yesno,     CodecId::interp,  CodecId::tournament,
    CodecId::rss_flat,   CodecId::rss_hg,  CodecId::rss_binom, CodecId::rss_rhg, CodecId::rss_nchg,
};

inline constexpr std::array<std::string_view, 10> kCodecNames = {
    "gap", "gap-wor", "yesno", "interp", "tournament", "rss-flat", "rss-hg", "rss-binom", "rss-rhg", "rss-nchg",
};

inline std::string_view codec_name(CodecId id) { return kCodecNames.at(static_cast<std::size_t>(id)); }

inline std::optional<CodecId> parse_codec(std::string_view name)
{
    for (std::size_t i = 0; i < kCodecNames.size(); ++i)
        if (kCodecNames[i] == name)
            return static_cast<CodecId>(i);
    return std::nullopt;
}

// Codecs whose per-node probabilities come from trained counters.
inline bool uses_counters(CodecId id)
{
    return id == CodecId::rss_binom || id == CodecId::rss_rhg || id == CodecId::rss_nchg;
}

inline bool is_rss(CodecId id) { return static_cast<std::uint8_t>(id) >= static_cast<std::uint8_t>(CodecId::rss_flat); }

// Largest universe whose set-size range [0, |U|] fits a 2^32-total table.
inline constexpr std::uint64_t kMaxUniverse = (std::uint64_t(1) << 32) - 1;

struct CodecOptions {
    bool permuted = false;  // code in probability-order permuted universe
    bool robust = true;     // smoothed statistics instead of trusting q in {0,1}
    // yesno: global Pr(x in S); other codecs: binomial set-size prior.
    std::optional<double> p_global;
    std::uint64_t wallenius_cutoff = kDefaultWalleniusCutoff;
};

namespace blob_flags {
inline constexpr std::uint8_t permuted = 1 << 0;
inline constexpr std::uint8_t robust = 1 << 1;
inline constexpr std::uint8_t has_model = 1 << 2;
inline constexpr std::uint8_t has_param = 1 << 3;
inline constexpr std::uint8_t known = permuted | robust | has_model | has_param;
} // namespace blob_flags

// Header fields shared by a single-set blob and the multi-set container.
struct BlobHeader {
    CodecId codec = CodecId::rss_hg;
    bool permuted = false;
    bool robust = true;
    std::uint64_t universe = 1;
    std::optional<std::uint64_t> model_fingerprint;
    std::optional<double> param;

    std::uint8_t flags() const
    {
        std::uint8_t f = 0;
        if (permuted)
            f |= blob_flags::permuted;
        if (robust)
            f |= blob_flags::robust;
        if (model_fingerprint)
            f |= blob_flags::has_model;
        if (param)
            f |= blob_flags::has_param;
        return f;
    }

    CodecOptions options() const
    {
        CodecOptions o;
        o.permuted = permuted;
        o.robust = robust;
        o.p_global = param;
        return o;
    }

    friend bool operator==(const BlobHeader&, const BlobHeader&) = default;
};

// codec u8 | flags u8 | universe u64 | [fingerprint u64] | [param f64]
inline void write_header_fields(wire::Writer& w, const BlobHeader& h)
{
    w.u8(static_cast<std::uint8_t>(h.codec));
    w.u8(h.flags());
    w.u64(h.universe);
    if (h.model_fingerprint)
        w.u64(*h.model_fingerprint);
    if (h.param)
        w.f64(*h.param);
}

inline BlobHeader read_header_fields(wire::Reader& r)
{
    BlobHeader h;
    const std::uint8_t codec = r.u8();
    if (codec >= kAllCodecs.size())
        throw FormatError("unknown codec id " + std::to_string(codec));
    h.codec = static_cast<CodecId>(codec);
    const std::uint8_t flags = r.u8();
    if (flags & ~blob_flags::known)
        throw FormatError("unknown header flags");
    h.permuted = flags & blob_flags::permuted;
    h.robust = flags & blob_flags::robust;
    h.universe = r.u64();
    if (h.universe < 1 || h.universe > kMaxUniverse)
        throw FormatError("universe out of range");
    if (flags & blob_flags::has_model)
        h.model_fingerprint = r.u64();
    if (flags & blob_flags::has_param) {
        h.param = r.f64();
        if (!(*h.param >= 0.0 && *h.param <= 1.0))
            throw FormatError("probability parameter outside [0,1]");
    }
    return h;
}

struct EncodedBlob {
    BlobHeader header;
    std::vector<std::uint8_t> payload;

    // header fields | payload length u32 | payload
    std::vector<std::uint8_t> to_bytes() const
    {
        wire::Writer w;
        write_header_fields(w, header);
        w.u32(static_cast<std::uint32_t>(payload.size()));
        w.bytes(std::span<const std::uint8_t>(payload));
        return w.take();
    }

    static EncodedBlob from_bytes(std::span<const std::uint8_t> bytes)
    {
        wire::Reader r(bytes);
        EncodedBlob b;
        b.header = read_header_fields(r);
        const std::uint32_t len = r.u32();
        if (r.remaining() < len)
            throw StreamExhausted();
        auto p = r.bytes(len);
        b.payload.assign(p.begin(), p.end());
        if (!r.at_end())
            throw FormatError("trailing bytes after blob");
        return b;
    }
};

struct EncodeStats {
    double ideal_bits = 0.0;      // all emissions
    double size_bits = 0.0;       // the |S| emission alone
    std::uint64_t actual_bits = 0; // payload length * 8 (0 in ideal-only mode)
    std::size_t emissions = 0;

    double element_bits() const { return ideal_bits - size_bits; }
};

// Low-short / high-short minimal binary code of x in [lo, hi], as an exact
// dyadic frequency table.
inline void minimal_binary(SymbolWriter& out, std::uint64_t x, std::uint64_t lo, std::uint64_t hi, bool low_short)
{
    if (lo == hi) {
        out.emit_uniform(x, lo, hi);
        return;
    }
    out.emit(x, FreqTable::truncated_binary(lo, hi, low_short));
}

inline std::uint64_t read_minimal_binary(SymbolReader& in, std::uint64_t lo, std::uint64_t hi, bool low_short)
{
    if (lo == hi)
        return lo;
    return in.read(FreqTable::truncated_binary(lo, hi, low_short));
}

class SetCodec {
public:
    SetCodec(CodecId codec, CodecOptions options = {}, const CounterModel* model = nullptr)
        : codec_(codec), opt_(options), model_(model)
    {
        if (opt_.p_global && !(*opt_.p_global >= 0.0 && *opt_.p_global <= 1.0))
            throw ContractError("p_global outside [0,1]");
        if (uses_counters(codec_) && !model_)
            throw ContractError(std::string(codec_name(codec_)) + " requires a trained model");
        if (codec_ == CodecId::yesno && !model_ && !opt_.p_global)
            throw ContractError("yesno requires a model or a global probability");
        if (opt_.permuted && !model_)
            throw ContractError("permuted coding requires a model");
        if (uses_counters(codec_) && model_->permuted() != opt_.permuted)
            throw ContractError(model_->permuted() ? "model counters are in permuted space; enable permutation"
                                                   : "model counters are in original space; disable permutation");
        if (opt_.permuted)
            perm_ = build_permutation(*model_);
    }

    CodecId codec() const noexcept { return codec_; }
    const CodecOptions& options() const noexcept { return opt_; }

    // True when decoding needs the same model (fingerprint is embedded).
    bool model_bound() const
    {
        return model_ && (uses_counters(codec_) || opt_.permuted || (codec_ == CodecId::yesno && !opt_.p_global));
    }

    BlobHeader header_for(std::uint64_t universe) const
    {
        BlobHeader h;
        h.codec = codec_;
        h.permuted = opt_.permuted;
        h.robust = opt_.robust;
        h.universe = universe;
        if (model_bound())
            h.model_fingerprint = model_->fingerprint();
        h.param = opt_.p_global;
        return h;
    }

    EncodedBlob encode(const SetInstance& set, EncodeStats* stats = nullptr) const
    {
        SymbolWriter out(true);
        write(out, set);
        EncodedBlob blob{header_for(set.universe()), out.finish()};
        if (stats)
            *stats = {out.ideal_bits(), out.size_bits(), blob.payload.size() * 8, out.emissions()};
        return blob;
    }

    // Codelength without producing a payload.
    EncodeStats measure(const SetInstance& set) const
    {
        SymbolWriter out(false);
        write(out, set);
        return {out.ideal_bits(), out.size_bits(), 0, out.emissions()};
    }

    std::vector<Emission> trace(const SetInstance& set) const
    {
        SymbolWriter out(false, true);
        write(out, set);
        return out.trace();
    }

    void write(SymbolWriter& out, const SetInstance& set) const
    {
        check_universe(set.universe());
        const SetInstance coded = perm_ ? perm_->apply(set) : set;
        switch (codec_) {
        case CodecId::gap: write_gap(out, coded, false); break;
        case CodecId::gap_wor: write_gap(out, coded, true); break;
        case CodecId::yesno: write_yesno(out, coded); break;
        case CodecId::interp: write_interp(out, coded); break;
        case CodecId::tournament: write_tournament(out, coded); break;
        default: write_rss(out, coded); break;
        }
    }

    SetInstance decode(const EncodedBlob& blob) const
    {
        const BlobHeader expect = header_for(blob.header.universe);
        if (blob.header.codec != expect.codec || blob.header.permuted != expect.permuted ||
            blob.header.robust != expect.robust || blob.header.param != expect.param)
            throw FormatError("blob header does not match the codec configuration");
        if (blob.header.model_fingerprint != expect.model_fingerprint)
            throw ModelMismatch("model fingerprint mismatch");
        return decode_payload(blob.header.universe, blob.payload);
    }

    SetInstance decode_payload(std::uint64_t universe, std::span<const std::uint8_t> payload) const
    {
        check_universe(universe);
        SymbolReader in(payload);
        SetInstance coded;
        switch (codec_) {
        case CodecId::gap: coded = read_gap(in, universe, false); break;
        case CodecId::gap_wor: coded = read_gap(in, universe, true); break;
        case CodecId::yesno: coded = read_yesno(in, universe); break;
        case CodecId::interp: coded = read_interp(in, universe); break;
        case CodecId::tournament: coded = read_tournament(in, universe); break;
        default: coded = read_rss(in, universe); break;
        }
        in.expect_end();
        return perm_ ? perm_->invert(coded) : coded;
    }

private:
    void check_universe(std::uint64_t universe) const
    {
        if (universe < 1 || universe > kMaxUniverse)
            throw ContractError("universe out of supported range");
        if (model_ && (model_bound() || uses_counters(codec_)) && model_->universe() != universe)
            throw ContractError("model universe " + std::to_string(model_->universe()) + " differs from set universe " +
                                std::to_string(universe));
    }

    QMode qmode() const { return opt_.robust ? QMode::robust : QMode::strict; }

    // ---- set size -------------------------------------------------------

    void write_size(SymbolWriter& out, std::uint64_t n, std::uint64_t universe) const
    {
        if (opt_.p_global)
            out.emit(n, binomial_set_size(universe, *opt_.p_global));
        else
            out.emit_uniform(n, 0, universe);
        out.mark_size_end();
    }

    std::uint64_t read_size(SymbolReader& in, std::uint64_t universe) const
    {
        if (opt_.p_global)
            return in.read(binomial_set_size(universe, *opt_.p_global));
        return in.read_uniform(0, universe);
    }

    // ---- gap codes ------------------------------------------------------

    // Gap before the next element: `remaining` elements (this one included)
    // still to place among the `slots` universe values above the previous one.
    Pmf gap_pmf(bool without_replacement, std::uint64_t set_size, std::uint64_t universe, std::uint64_t remaining,
                std::uint64_t slots) const
    {
        if (without_replacement)
            return gap_without_replacement(remaining, slots);
        const double p = static_cast<double>(set_size) / static_cast<double>(universe);
        return geometric_gap(p, slots - remaining + 1);
    }

    void write_gap(SymbolWriter& out, const SetInstance& s, bool wor) const
    {
        const std::uint64_t u = s.universe();
        const std::uint64_t n = s.size();
        write_size(out, n, u);
        std::uint64_t next_free = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::uint64_t x = s.elements()[i];
            out.emit(x - next_free, gap_pmf(wor, n, u, n - i, u - next_free));
            next_free = x + 1;
        }
    }

    SetInstance read_gap(SymbolReader& in, std::uint64_t u, bool wor) const
    {
        const std::uint64_t n = read_size(in, u);
        std::vector<std::uint64_t> elems;
        elems.reserve(n);
        std::uint64_t next_free = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            const std::uint64_t x = next_free + in.read(gap_pmf(wor, n, u, n - i, u - next_free));
            elems.push_back(x);
            next_free = x + 1;
        }
        return SetInstance(u, std::move(elems));
    }

    // ---- yes/no ---------------------------------------------------------

    // Pr(x in S) for x in coded space; nullopt when undefined.
    double inclusion_probability(std::uint64_t x) const
    {
        if (opt_.p_global)
            return *opt_.p_global;
        const std::uint64_t orig = perm_ ? perm_->inverse()[x] : x;
        const std::uint64_t c = model_->elem_counts()[orig];
        const std::uint64_t n = model_->n_train();
        if (opt_.robust)
            return (static_cast<double>(c) + 0.5) / (static_cast<double>(n) + 1.0);
        if (n == 0)
            throw UndefinedContext("yesno: model trained on zero sets");
        return static_cast<double>(c) / static_cast<double>(n);
    }

    void write_yesno(SymbolWriter& out, const SetInstance& s) const
    {
        std::size_t next = 0;
        for (std::uint64_t x = 0; x < s.universe(); ++x) {
            const bool in_set = next < s.size() && s.elements()[next] == x;
            next += in_set;
            const double p = inclusion_probability(x);
            if (p == 0.0 || p == 1.0) {
                if (in_set != (p == 1.0))
                    throw ModelContradiction("element " + std::to_string(x) + " contradicts certain model");
                continue;
            }
            out.emit(in_set ? 1 : 0, Pmf(0, {1.0 - p, p}));
        }
    }

    SetInstance read_yesno(SymbolReader& in, std::uint64_t u) const
    {
        std::vector<std::uint64_t> elems;
        for (std::uint64_t x = 0; x < u; ++x) {
            const double p = inclusion_probability(x);
            bool in_set;
            if (p == 0.0 || p == 1.0)
                in_set = p == 1.0;
            else
                in_set = in.read(Pmf(0, {1.0 - p, p})) == 1;
            if (in_set)
                elems.push_back(x);
        }
        return SetInstance(u, std::move(elems));
    }

    // ---- interpolative --------------------------------------------------

    // Element at index m = (n-1)/2 of the slice, known to lie in
    // [lo + m, hi - (n-1-m)], then the two halves.
    static void write_interp_slice(SymbolWriter& out, std::span<const std::uint64_t> slice, std::uint64_t lo,
                                   std::uint64_t hi)
    {
        const std::size_t n = slice.size();
        if (n == 0)
            return;
        const std::size_t m = (n - 1) / 2;
        const std::uint64_t x = slice[m];
        minimal_binary(out, x, lo + m, hi - (n - 1 - m), true);
        write_interp_slice(out, slice.first(m), lo, x - 1);
        write_interp_slice(out, slice.subspan(m + 1), x + 1, hi);
    }

    static void read_interp_slice(SymbolReader& in, std::uint64_t* dst, std::size_t n, std::uint64_t lo,
                                  std::uint64_t hi)
    {
        if (n == 0)
            return;
        const std::size_t m = (n - 1) / 2;
        if (lo + m > hi - (n - 1 - m) || hi < n - 1 - m)
            throw FormatError("interpolative bounds collapsed");
        const std::uint64_t x = read_minimal_binary(in, lo + m, hi - (n - 1 - m), true);
        dst[m] = x;
        read_interp_slice(in, dst, m, lo, x - 1);
        read_interp_slice(in, dst + m + 1, n - 1 - m, x + 1, hi);
    }

    void write_interp(SymbolWriter& out, const SetInstance& s) const
    {
        const std::uint64_t n = s.size();
        write_size(out, n, s.universe());
        if (n == 0)
            return;
        const std::uint64_t top = s.elements().back();
        minimal_binary(out, top, n - 1, s.universe() - 1, true);
        write_interp_slice(out, std::span(s.elements()).first(n - 1), 0, top - 1);
    }

    SetInstance read_interp(SymbolReader& in, std::uint64_t u) const
    {
        const std::uint64_t n = read_size(in, u);
        if (n == 0)
            return SetInstance(u, {});
        std::vector<std::uint64_t> elems(n);
        elems[n - 1] = read_minimal_binary(in, n - 1, u - 1, true);
        if (n > 1)
            read_interp_slice(in, elems.data(), n - 1, 0, elems[n - 1] - 1);
        return SetInstance(u, std::move(elems));
    }

    // ---- tournament -----------------------------------------------------

    // gaps[a, b) have maximum `top`: code the left half's maximum in
    // [0, top]; the right half's maximum is `top` unless the left half owns
    // it, in which case it is coded in [0, top] too.
    static void write_tournament_seg(SymbolWriter& out, std::span<const std::uint64_t> gaps, std::uint64_t top)
    {
        if (gaps.size() <= 1)
            return;
        const std::size_t mid = gaps.size() / 2;
        const auto left = gaps.first(mid);
        const auto right = gaps.subspan(mid);
        const std::uint64_t lmax = *std::max_element(left.begin(), left.end());
        minimal_binary(out, lmax, 0, top, false);
        std::uint64_t rmax = top;
        if (lmax == top) {
            rmax = *std::max_element(right.begin(), right.end());
            minimal_binary(out, rmax, 0, top, false);
        }
        write_tournament_seg(out, left, lmax);
        write_tournament_seg(out, right, rmax);
    }

    static void read_tournament_seg(SymbolReader& in, std::span<std::uint64_t> gaps, std::uint64_t top)
    {
        if (gaps.empty())
            return;
        if (gaps.size() == 1) {
            gaps[0] = top;
            return;
        }
        const std::size_t mid = gaps.size() / 2;
        const std::uint64_t lmax = read_minimal_binary(in, 0, top, false);
        const std::uint64_t rmax = lmax == top ? read_minimal_binary(in, 0, top, false) : top;
        read_tournament_seg(in, gaps.first(mid), lmax);
        read_tournament_seg(in, gaps.subspan(mid), rmax);
    }

    void write_tournament(SymbolWriter& out, const SetInstance& s) const
    {
        const std::uint64_t n = s.size();
        const std::uint64_t u = s.universe();
        write_size(out, n, u);
        if (n == 0)
            return;
        std::vector<std::uint64_t> gaps(n);
        std::uint64_t next_free = 0;
        for (std::size_t i = 0; i < n; ++i) {
            gaps[i] = s.elements()[i] - next_free;
            next_free = s.elements()[i] + 1;
        }
        const std::uint64_t top = *std::max_element(gaps.begin(), gaps.end());
        minimal_binary(out, top, 0, u - n, false);
        write_tournament_seg(out, gaps, top);
    }

    SetInstance read_tournament(SymbolReader& in, std::uint64_t u) const
    {
        const std::uint64_t n = read_size(in, u);
        if (n == 0)
            return SetInstance(u, {});
        std::vector<std::uint64_t> gaps(n);
        const std::uint64_t top = read_minimal_binary(in, 0, u - n, false);
        read_tournament_seg(in, gaps, top);
        std::vector<std::uint64_t> elems(n);
        std::uint64_t next_free = 0;
        for (std::size_t i = 0; i < n; ++i) {
            elems[i] = next_free + gaps[i];
            next_free = elems[i] + 1;
        }
        if (n > 0 && elems.back() >= u)
            throw FormatError("tournament gaps exceed the universe");
        return SetInstance(u, std::move(elems));
    }

    // ---- recursive subset size ------------------------------------------

    // Model for n_t at the left child of `parent`: either a forced value (no
    // emission) or a pmf/table over the feasible range.
    struct NodeModel {
        std::optional<std::uint64_t> forced;
        std::optional<FreqTable> table;
        Pmf pmf;
        Range range;
    };

    NodeModel node_model(const Node& parent, const Node& left, std::uint64_t n_p) const
    {
        NodeModel nm;
        nm.range = feasible_range(n_p, left.size, parent.size);
        if (nm.range.width() == 1) {
            nm.table = FreqTable::uniform(nm.range.lo, nm.range.hi);
            return nm;
        }
        NodeContext ctx{n_p, left.size, parent.size - left.size, std::nullopt};
        switch (codec_) {
        case CodecId::rss_flat: nm.table = FreqTable::uniform(nm.range.lo, nm.range.hi); return nm;
        case CodecId::rss_hg: nm.pmf = hypergeometric(ctx); return nm;
        default: break;
        }

        const double q = q_from_counts(model_->left_count(parent), model_->count(parent), qmode());
        if (q == 0.0) {
            nm.forced = 0;
            return nm;
        }
        if (q == 1.0) {
            nm.forced = std::min(n_p, ctx.s);
            return nm;
        }
        ctx.q = q;
        if (codec_ == CodecId::rss_nchg) {
            nm.pmf = wallenius(ctx, opt_.wallenius_cutoff);
            return nm;
        }
        const ExcludedCase ex = case_exclusion(std::nullopt, ctx);
        if (codec_ == CodecId::rss_binom) {
            nm.pmf = truncated_binomial(ex.ctx).shifted(ex.shift);
        } else {
            const NodeContext scaled = rescale_hypergeometric(ex.ctx);
            nm.pmf = restrict_to(hypergeometric(scaled), 0, ex.ctx.n_p).shifted(ex.shift);
        }
        return nm;
    }

    // Restricts a pmf to [lo, hi] and renormalizes.
    static Pmf restrict_to(const Pmf& pmf, std::uint64_t lo, std::uint64_t hi)
    {
        if (pmf.lo() == lo && pmf.hi() == hi)
            return pmf;
        std::vector<double> lm;
        lm.reserve(hi - lo + 1);
        for (std::uint64_t m = lo; m <= hi; ++m)
            lm.push_back(-pmf.bits(m) * std::numbers::ln2);
        if (std::all_of(lm.begin(), lm.end(), [](double v) { return std::isinf(v); }))
            throw ContractError("pmf has no mass on the feasible range");
        return Pmf::from_log(lo, std::move(lm));
    }

    void write_rss(SymbolWriter& out, const SetInstance& s) const
    {
        write_size(out, s.size(), s.universe());
        for (const SubsetCount& sc : subset_counts(s)) {
            const NodeModel nm = node_model(sc.parent, sc.node, sc.parent_count);
            if (nm.forced) {
                if (*nm.forced != sc.count)
                    throw ModelContradiction("subset size " + std::to_string(sc.count) + " at node (h=" +
                                             std::to_string(sc.node.height) + ", lo=" + std::to_string(sc.node.lo) +
                                             ") contradicts a certain model");
                continue;
            }
            if (nm.table)
                out.emit(sc.count, *nm.table);
            else
                out.emit(sc.count, nm.pmf);
        }
    }

    SetInstance read_rss(SymbolReader& in, std::uint64_t u) const
    {
        const std::uint64_t n = read_size(in, u);
        return rebuild_set(u, n, [&](const Node& parent, const Node& left, std::uint64_t n_p) {
            const NodeModel nm = node_model(parent, left, n_p);
            if (nm.forced)
                return *nm.forced;
            if (nm.table)
                return in.read(*nm.table);
            return in.read(nm.pmf);
        });
    }

    CodecId codec_;
    CodecOptions opt_;
    const CounterModel* model_;
    std::optional<Permutation> perm_;
};

// Rebuilds the codec a header was written by. `model` must be the model used
// for encoding whenever the header records one.
inline SetCodec codec_for_header(const BlobHeader& header, const CounterModel* model = nullptr)
{
    if (header.model_fingerprint) {
        if (!model)
            throw ModelMismatch("data was encoded with a model; none supplied");
        if (model->fingerprint() != *header.model_fingerprint)
            throw ModelMismatch("model fingerprint mismatch");
    }
    const bool needs_model =
        uses_counters(header.codec) || header.permuted || (header.codec == CodecId::yesno && !header.param);
    if (needs_model && !header.model_fingerprint)
        throw FormatError("header requires a model but carries no fingerprint");
    return SetCodec(header.codec, header.options(), needs_model ? model : nullptr);
}

inline SetInstance decode(const EncodedBlob& blob, const CounterModel* model = nullptr)
{
    return codec_for_header(blob.header, model).decode(blob);
}

inline EncodedBlob encode(CodecId id, const SetInstance& set, const CodecOptions& options = {},
                          const CounterModel* model = nullptr)
{
    return SetCodec(id, options, model).encode(set);
}

} // namespace setcomp
