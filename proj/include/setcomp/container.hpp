#pragma once

// Multi-set compressed file:
//
//   "RSZ1" | version u8 | codec u8 | flags u8 | universe u64 | set count u64
//   | [model fingerprint u64] | [param f64] | per set: length u32, payload
//
// Flags and the optional fields are those of BlobHeader.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "setcomp/codecs.hpp"
#include "setcomp/corpus.hpp"
#include "setcomp/wire.hpp"

namespace setcomp {

struct Container {
    static constexpr char kMagic[4] = {'R', 'S', 'Z', '1'};
    static constexpr std::uint8_t kVersion = 1;

    BlobHeader header;
    std::vector<std::vector<std::uint8_t>> payloads;

    std::vector<std::uint8_t> to_bytes() const
    {
        wire::Writer w;
        w.bytes(kMagic);
        w.u8(kVersion);
        w.u8(static_cast<std::uint8_t>(header.codec));
        w.u8(header.flags());
        w.u64(header.universe);
        w.u64(payloads.size());
        if (header.model_fingerprint)
            w.u64(*header.model_fingerprint);
        if (header.param)
            w.f64(*header.param);
        for (const auto& p : payloads) {
            if (p.size() > std::numeric_limits<std::uint32_t>::max())
                throw ContractError("payload too large for container");
            w.u32(static_cast<std::uint32_t>(p.size()));
            w.bytes(std::span<const std::uint8_t>(p));
        }
        return w.take();
    }

    static Container from_bytes(std::span<const std::uint8_t> bytes)
    {
        wire::Reader r(bytes);
        if (!r.magic(kMagic))
            throw FormatError("container: bad magic");
        if (r.u8() != kVersion)
            throw FormatError("container: unsupported version");
        // same field layout as a blob header, with the set count after the universe
        wire::Writer head;
        head.u8(r.u8());
        const std::uint8_t flags = r.u8();
        head.u8(flags);
        head.u64(r.u64());
        const std::uint64_t count = r.u64();
        if (flags & blob_flags::has_model)
            head.u64(r.u64());
        if (flags & blob_flags::has_param)
            head.u64(r.u64());
        const auto head_bytes = head.take();
        wire::Reader hr(head_bytes);
        Container c;
        c.header = read_header_fields(hr);
        if (count > r.remaining() / 4)
            throw FormatError("container: set count exceeds file size");
        c.payloads.reserve(count);
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::uint32_t len = r.u32();
            if (r.remaining() < len)
                throw StreamExhausted();
            auto p = r.bytes(len);
            c.payloads.emplace_back(p.begin(), p.end());
        }
        if (!r.at_end())
            throw FormatError("container: trailing bytes");
        return c;
    }
};

inline Container encode_dataset(const SetCodec& codec, const Dataset& data)
{
    Container c;
    c.header = codec.header_for(data.universe);
    c.payloads.reserve(data.sets.size());
    for (const auto& s : data.sets)
        c.payloads.push_back(codec.encode(s).payload);
    return c;
}

inline Dataset decode_container(const Container& c, const CounterModel* model = nullptr)
{
    const SetCodec codec = codec_for_header(c.header, model);
    Dataset d;
    d.universe = c.header.universe;
    d.sets.reserve(c.payloads.size());
    for (const auto& p : c.payloads)
        d.sets.push_back(codec.decode_payload(c.header.universe, p));
    return d;
}

} // namespace setcomp
