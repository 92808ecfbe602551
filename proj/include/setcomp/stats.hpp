#pragma once

// Trained statistics for the recursive subset-size code: one counter per left
// child of the universe tree (plus the root), per-element appearance counts,
// and the probability-order permutation of the universe derived from them.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "setcomp/error.hpp"
#include "setcomp/settree.hpp"
#include "setcomp/wire.hpp"

namespace setcomp {

enum class QMode { strict, robust };

// q_t from a left-child counter and its parent's counter.
// strict: C_t / C_p; robust: (C_t + 1/2) / (C_p + 1).
inline double q_from_counts(std::uint64_t c_t, std::uint64_t c_p, QMode mode)
{
    if (c_t > c_p)
        throw ContractError("left counter exceeds parent counter");
    if (mode == QMode::robust)
        return (static_cast<double>(c_t) + 0.5) / (static_cast<double>(c_p) + 1.0);
    if (c_p == 0)
        throw UndefinedContext("q undefined: parent counter is zero");
    return static_cast<double>(c_t) / static_cast<double>(c_p);
}

class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<std::uint64_t> forward) : forward_(std::move(forward)), inverse_(forward_.size())
    {
        std::vector<bool> seen(forward_.size(), false);
        for (std::size_t x = 0; x < forward_.size(); ++x) {
            const std::uint64_t y = forward_[x];
            if (y >= forward_.size() || seen[y])
                throw ContractError("not a permutation");
            seen[y] = true;
            inverse_[y] = x;
        }
    }

    static Permutation identity(std::uint64_t universe)
    {
        std::vector<std::uint64_t> f(universe);
        std::iota(f.begin(), f.end(), std::uint64_t(0));
        return Permutation(std::move(f));
    }

    std::uint64_t universe() const noexcept { return forward_.size(); }
    const std::vector<std::uint64_t>& forward() const noexcept { return forward_; }
    const std::vector<std::uint64_t>& inverse() const noexcept { return inverse_; }
    bool is_identity() const
    {
        for (std::size_t i = 0; i < forward_.size(); ++i)
            if (forward_[i] != i)
                return false;
        return true;
    }

    SetInstance apply(const SetInstance& s) const { return map(s, forward_); }
    SetInstance invert(const SetInstance& s) const { return map(s, inverse_); }

private:
    SetInstance map(const SetInstance& s, const std::vector<std::uint64_t>& table) const
    {
        if (s.universe() != universe())
            throw ContractError("permutation universe mismatch");
        std::vector<std::uint64_t> out;
        out.reserve(s.size());
        for (std::uint64_t x : s.elements())
            out.push_back(table[x]);
        return SetInstance::from_unsorted(s.universe(), std::move(out));
    }

    std::vector<std::uint64_t> forward_;
    std::vector<std::uint64_t> inverse_;
};

class CounterModel {
public:
    CounterModel() : CounterModel(1) {}

    explicit CounterModel(std::uint64_t universe, bool permuted = false)
        : universe_(universe), permuted_(permuted), elem_counts_(universe, 0)
    {
        const unsigned height = tree_height(universe);
        level_offset_.assign(height + 1, 0);
        std::size_t n = 1;  // root
        for (unsigned h = height; h >= 1; --h) {
            level_offset_[h] = n;
            n += parents_at(h);
        }
        counters_.assign(n, 0);
    }

    std::uint64_t universe() const noexcept { return universe_; }
    std::uint64_t n_train() const noexcept { return n_train_; }
    bool permuted() const noexcept { return permuted_; }
    const std::vector<std::uint64_t>& counters() const noexcept { return counters_; }
    const std::vector<std::uint64_t>& elem_counts() const noexcept { return elem_counts_; }
    // Content hash of the serialized model. Recomputed lazily after training;
    // call finalize() before sharing a model across threads.
    std::uint64_t fingerprint() const
    {
        if (dirty_)
            refresh_fingerprint();
        return fingerprint_;
    }

    void finalize() const { (void)fingerprint(); }

    std::uint64_t root_count() const noexcept { return counters_[0]; }

    // C_t of the left child of `parent` (a node at height >= 1).
    std::uint64_t left_count(const Node& parent) const { return counters_[index_of_left(parent)]; }

    // Counter of any node, with right-child counters implied as C_p - C_left.
    std::uint64_t count(const Node& node) const
    {
        Node cur = root_node(universe_);
        std::uint64_t c = root_count();
        while (cur.height > node.height) {
            const Node left = left_child(cur);
            const std::uint64_t cl = left_count(cur);
            if (node.lo < left.end()) {
                cur = left;
                c = cl;
            } else {
                cur = right_child(cur);
                c -= cl;
            }
        }
        if (cur.lo != node.lo)
            throw ContractError("node is not part of the universe tree");
        return c;
    }

    // Adds one sample set. `coded` is the set in the space the counter tree
    // lives in (permuted when permuted()); `original` feeds the element counts.
    void observe(const SetInstance& coded, const SetInstance& original)
    {
        if (coded.universe() != universe_ || original.universe() != universe_)
            throw ContractError("training set universe mismatch");
        counters_[0] += coded.size();
        for (const SubsetCount& sc : subset_counts(coded))
            counters_[index_of_left(sc.parent)] += sc.count;
        for (std::uint64_t x : original.elements())
            ++elem_counts_[x];
        ++n_train_;
        dirty_ = true;
    }

    void observe(const SetInstance& set) { observe(set, set); }

    // Serialized form without the trailing fingerprint.
    std::vector<std::uint8_t> body_bytes() const
    {
        wire::Writer w;
        w.bytes(kMagic);
        w.u8(kVersion);
        w.u8(permuted_ ? 1 : 0);
        w.u64(universe_);
        w.u64(n_train_);
        for (std::uint64_t c : counters_)
            w.u64(c);
        for (std::uint64_t c : elem_counts_)
            w.u64(c);
        return w.take();
    }

    std::vector<std::uint8_t> to_bytes() const
    {
        auto out = body_bytes();
        wire::append_u64(out, fingerprint());
        return out;
    }

    static CounterModel from_bytes(std::span<const std::uint8_t> bytes)
    {
        wire::Reader r(bytes);
        if (!r.magic(kMagic))
            throw FormatError("model: bad magic");
        if (r.u8() != kVersion)
            throw FormatError("model: unsupported version");
        const std::uint8_t flags = r.u8();
        if (flags > 1)
            throw FormatError("model: unknown flags");
        const std::uint64_t universe = r.u64();
        if (universe < 1 || universe > r.remaining() / 8)
            throw FormatError("model: bad universe or truncated file");
        CounterModel m(universe, flags & 1);
        m.n_train_ = r.u64();
        for (auto& c : m.counters_)
            c = r.u64();
        for (auto& c : m.elem_counts_)
            c = r.u64();
        const std::uint64_t stored = r.u64();
        if (!r.at_end())
            throw FormatError("model: trailing bytes");
        m.refresh_fingerprint();
        if (stored != m.fingerprint_)
            throw FormatError("model: fingerprint mismatch");
        m.check_consistency();
        return m;
    }

    // Throws FormatError when the counter invariants do not hold.
    void check_consistency() const
    {
        std::uint64_t total = 0;
        for (std::uint64_t c : elem_counts_) {
            if (c > n_train_)
                throw FormatError("model: element count exceeds number of training sets");
            total += c;
        }
        if (total != root_count())
            throw FormatError("model: root counter differs from total element count");
        std::vector<std::uint64_t> leaf_expect(elem_counts_);
        if (permuted_) {
            // leaves are ranks; rank r holds the r-th most frequent element
            std::sort(leaf_expect.begin(), leaf_expect.end(), std::greater<>());
        }
        check_node(root_node(universe_), root_count(), leaf_expect);
    }

    friend bool operator==(const CounterModel& a, const CounterModel& b)
    {
        return a.universe_ == b.universe_ && a.permuted_ == b.permuted_ && a.n_train_ == b.n_train_ &&
               a.counters_ == b.counters_ && a.elem_counts_ == b.elem_counts_ && a.fingerprint() == b.fingerprint();
    }

    static constexpr char kMagic[4] = {'R', 'S', 'M', '1'};
    static constexpr std::uint8_t kVersion = 1;

private:
    std::size_t parents_at(unsigned h) const
    {
        const std::uint64_t span = std::uint64_t(1) << h;
        return static_cast<std::size_t>((universe_ + span - 1) / span);
    }

    std::size_t index_of_left(const Node& parent) const
    {
        if (parent.height < 1 || parent.height >= level_offset_.size())
            throw ContractError("node has no left child");
        return level_offset_[parent.height] + static_cast<std::size_t>(parent.lo >> parent.height);
    }

    void check_node(const Node& node, std::uint64_t c, const std::vector<std::uint64_t>& leaf_expect) const
    {
        if (node.is_leaf()) {
            if (c != leaf_expect[node.lo])
                throw FormatError("model: leaf counter disagrees with element count");
            return;
        }
        const std::uint64_t cl = left_count(node);
        if (cl > c)
            throw FormatError("model: left counter exceeds parent counter");
        const Node left = left_child(node);
        check_node(left, cl, leaf_expect);
        if (left.size < node.size)
            check_node(right_child(node), c - cl, leaf_expect);
        else if (cl != c)
            throw FormatError("model: counter lost below a single-child node");
    }

    void refresh_fingerprint() const
    {
        fingerprint_ = wire::fnv1a64(body_bytes());
        dirty_ = false;
    }

    std::uint64_t universe_;
    bool permuted_;
    std::uint64_t n_train_ = 0;
    std::vector<std::size_t> level_offset_;
    std::vector<std::uint64_t> counters_;
    std::vector<std::uint64_t> elem_counts_;
    mutable std::uint64_t fingerprint_ = 0;
    mutable bool dirty_ = true;
};

// Elements in non-increasing order of appearance count, ties by ascending id;
// forward maps the most frequent element to 0.
inline Permutation build_permutation(std::span<const std::uint64_t> elem_counts)
{
    std::vector<std::uint64_t> order(elem_counts.size());
    std::iota(order.begin(), order.end(), std::uint64_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint64_t a, std::uint64_t b) { return elem_counts[a] > elem_counts[b]; });
    std::vector<std::uint64_t> forward(order.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank)
        forward[order[rank]] = rank;
    return Permutation(std::move(forward));
}

inline Permutation build_permutation(const CounterModel& model) { return build_permutation(model.elem_counts()); }

inline double q_value(const CounterModel& model, const Node& parent, QMode mode)
{
    return q_from_counts(model.left_count(parent), model.count(parent), mode);
}

// Trains a counter model. With `permute`, element counts are gathered first,
// the probability-order permutation is derived from them, and the counter
// tree is trained over the permuted sets.
inline CounterModel train(std::span<const SetInstance> sets, std::uint64_t universe, bool permute = false)
{
    CounterModel model(universe, permute);
    if (!permute) {
        for (const auto& s : sets)
            model.observe(s);
        model.finalize();
        return model;
    }
    std::vector<std::uint64_t> counts(universe, 0);
    for (const auto& s : sets) {
        if (s.universe() != universe)
            throw ContractError("training set universe mismatch");
        for (std::uint64_t x : s.elements())
            ++counts[x];
    }
    const Permutation perm = build_permutation(counts);
    for (const auto& s : sets)
        model.observe(perm.apply(s), s);
    model.finalize();
    return model;
}

inline void save_model(const CounterModel& model, const std::string& path)
{
    wire::write_file(path, model.to_bytes());
}

inline CounterModel load_model(const std::string& path) { return CounterModel::from_bytes(wire::read_file(path)); }

} // namespace setcomp
