#pragma once

// Implicit binary tree over the universe [0, |U|): the complete tree with
// 2^ceil(log2 |U|) leaves cut off to the right of leaf |U|-1. Nodes are
// addressed by (height, lo) and never materialized.

#include <algorithm>
#include <bit>
#include <concepts>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "setcomp/error.hpp"

namespace setcomp {

// Sorted, duplicate-free elements drawn from [0, universe).
class SetInstance {
public:
    SetInstance() = default;

    SetInstance(std::uint64_t universe, std::vector<std::uint64_t> elements)
        : universe_(universe), elements_(std::move(elements))
    {
        if (universe_ < 1)
            throw ContractError("universe must be >= 1");
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (elements_[i] >= universe_)
                throw ContractError("element " + std::to_string(elements_[i]) + " outside universe " +
                                    std::to_string(universe_));
            if (i > 0 && elements_[i] <= elements_[i - 1])
                throw ContractError("elements must be strictly increasing");
        }
    }

    // Sorts and validates an arbitrary list of distinct elements.
    static SetInstance from_unsorted(std::uint64_t universe, std::vector<std::uint64_t> elements)
    {
        std::sort(elements.begin(), elements.end());
        return SetInstance(universe, std::move(elements));
    }

    std::uint64_t universe() const noexcept { return universe_; }
    const std::vector<std::uint64_t>& elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }

    friend bool operator==(const SetInstance&, const SetInstance&) = default;

private:
    std::uint64_t universe_ = 1;
    std::vector<std::uint64_t> elements_;
};

struct Node {
    unsigned height = 0;
    std::uint64_t lo = 0;
    std::uint64_t size = 1;  // V, the number of universe elements below

    bool is_leaf() const noexcept { return height == 0; }
    std::uint64_t end() const noexcept { return lo + size; }

    friend bool operator==(const Node&, const Node&) = default;
};

inline unsigned tree_height(std::uint64_t universe)
{
    if (universe < 1)
        throw ContractError("universe must be >= 1");
    return static_cast<unsigned>(std::bit_width(universe - 1));
}

inline Node root_node(std::uint64_t universe) { return {tree_height(universe), 0, universe}; }

// (V_l, V_r) for a parent of size V_p at height h; V_r = 0 means there is no
// right child.
inline std::pair<std::uint64_t, std::uint64_t> child_sizes(std::uint64_t parent_size, unsigned height)
{
    if (height < 1 || height > 63)
        throw ContractError("child_sizes: height out of range");
    const std::uint64_t half = std::uint64_t(1) << (height - 1);
    if (parent_size < 1 || parent_size > 2 * half)
        throw ContractError("child_sizes: parent size out of range");
    const std::uint64_t left = std::min(half, parent_size);
    return {left, parent_size - left};
}

inline Node left_child(const Node& parent)
{
    auto [vl, vr] = child_sizes(parent.size, parent.height);
    (void)vr;
    return {parent.height - 1, parent.lo, vl};
}

inline Node right_child(const Node& parent)
{
    auto [vl, vr] = child_sizes(parent.size, parent.height);
    return {parent.height - 1, parent.lo + vl, vr};
}

struct Range {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    std::uint64_t width() const noexcept { return hi - lo + 1; }
    bool contains(std::uint64_t v) const noexcept { return v >= lo && v <= hi; }
    friend bool operator==(const Range&, const Range&) = default;
};

// Possible subset sizes of a left child of size V_t under a parent of size
// V_p holding n_p elements. V_t = V_p occurs when the right child is absent.
inline Range feasible_range(std::uint64_t n_p, std::uint64_t v_t, std::uint64_t v_p)
{
    if (v_t < 1 || v_t > v_p || n_p > v_p)
        throw ContractError("feasible_range: invalid sizes");
    const std::uint64_t lo = n_p + v_t > v_p ? n_p + v_t - v_p : 0;
    return {lo, std::min(n_p, v_t)};
}

// One left-child emission of the recursive subset-size traversal.
struct SubsetCount {
    Node parent;
    Node node;                  // the left child
    std::uint64_t parent_count; // n_p
    std::uint64_t count;        // n_t

    Range range() const { return feasible_range(parent_count, node.size, parent.size); }
};

namespace detail {
inline void collect_counts(const Node& parent, std::span<const std::uint64_t> elems, std::vector<SubsetCount>& out)
{
    if (parent.is_leaf() || elems.empty())
        return;
    const Node left = left_child(parent);
    const auto split = std::lower_bound(elems.begin(), elems.end(), left.end());
    const auto n_left = static_cast<std::uint64_t>(split - elems.begin());
    out.push_back({parent, left, elems.size(), n_left});
    collect_counts(left, elems.first(n_left), out);
    if (left.size < parent.size)
        collect_counts(right_child(parent), elems.subspan(n_left), out);
}
} // namespace detail

// All left-child subset sizes under nonempty parents, in inorder
// (depth-first, left-to-right) emission order. |S| itself is not included.
inline std::vector<SubsetCount> subset_counts(const SetInstance& set)
{
    std::vector<SubsetCount> out;
    detail::collect_counts(root_node(set.universe()), set.elements(), out);
    return out;
}

// Walks the same traversal as subset_counts, asking `next` for each left
// child's count; rebuilds the set. `next(parent, left, n_p)` must return a
// value in the feasible range.
template <class NextCount>
    requires std::invocable<NextCount&, const Node&, const Node&, std::uint64_t>
SetInstance rebuild_set(std::uint64_t universe, std::uint64_t root_count, NextCount&& next)
{
    std::vector<std::uint64_t> elems;
    elems.reserve(root_count);
    std::function<void(const Node&, std::uint64_t)> visit = [&](const Node& parent, std::uint64_t n_p) {
        if (n_p == 0)
            return;
        if (parent.is_leaf()) {
            elems.push_back(parent.lo);
            return;
        }
        const Node left = left_child(parent);
        const std::uint64_t n_left = next(parent, left, n_p);
        if (!feasible_range(n_p, left.size, parent.size).contains(n_left))
            throw FormatError("decoded subset size outside its feasible range");
        visit(left, n_left);
        if (left.size < parent.size)
            visit(right_child(parent), n_p - n_left);
    };
    if (root_count > universe)
        throw FormatError("set size exceeds universe");
    visit(root_node(universe), root_count);
    return SetInstance(universe, std::move(elems));
}

// Inverse of subset_counts given the counts in emission order.
inline SetInstance rebuild_set(std::uint64_t universe, std::uint64_t root_count,
                               std::span<const std::uint64_t> counts)
{
    std::size_t i = 0;
    return rebuild_set(universe, root_count, [&](const Node&, const Node&, std::uint64_t) {
        if (i >= counts.size())
            throw FormatError("too few subset counts");
        return counts[i++];
    });
}

} // namespace setcomp
