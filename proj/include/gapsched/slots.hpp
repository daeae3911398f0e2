#ifndef GAPSCHED_SLOTS_HPP
#define GAPSCHED_SLOTS_HPP

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <numeric>
#include <vector>

#include "gapsched/model.hpp"

namespace gapsched {

struct SlotProbe {
    bool fits = false;
    double start = 0.0;
    std::uint64_t mask = 0;
};

/// Per-node processor-element slots, each with a next-free time.
///
/// A task needing k elements takes the k slots that free up first and
/// starts once all of them are free; slots are never backfilled.
class SlotBoard {
  public:
    SlotBoard() = default;
    explicit SlotBoard(const std::vector<FogNode>& nodes) {
        free_.reserve(nodes.size());
        for (const auto& n : nodes) free_.emplace_back(static_cast<std::size_t>(n.npe_slots), 0.0);
    }

    std::size_t node_count() const noexcept { return free_.size(); }
    int slot_count(std::size_t node) const { return static_cast<int>(free_[node].size()); }
    double free_at(std::size_t node, int slot) const { return free_[node][static_cast<std::size_t>(slot)]; }

    SlotProbe probe(std::size_t node, int npe, double ready) const {
        const auto& slots = free_[node];
        const std::size_t k = static_cast<std::size_t>(npe);
        if (k == 0 || k > slots.size()) return {};
        std::array<std::uint8_t, 64> idx{};
        std::iota(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(slots.size()), std::uint8_t{0});
        auto first = idx.begin();
        auto last = first + static_cast<std::ptrdiff_t>(slots.size());
        auto earlier = [&](std::uint8_t a, std::uint8_t b) {
            return slots[a] != slots[b] ? slots[a] < slots[b] : a < b;
        };
        std::partial_sort(first, first + static_cast<std::ptrdiff_t>(k), last, earlier);
        SlotProbe p{true, ready, 0};
        for (std::size_t i = 0; i < k; ++i) {
            p.start = std::max(p.start, slots[idx[i]]);
            p.mask |= std::uint64_t{1} << idx[i];
        }
        return p;
    }

    /// Earliest start at or after `ready` on exactly the slots in `mask`.
    double start_on(std::size_t node, std::uint64_t mask, double ready) const {
        double start = ready;
        for_each_slot(mask, [&](int s) { start = std::max(start, free_[node][static_cast<std::size_t>(s)]); });
        return start;
    }

    void reserve(std::size_t node, std::uint64_t mask, double until) {
        for_each_slot(mask, [&](int s) { free_[node][static_cast<std::size_t>(s)] = until; });
    }

    template <class F>
    static void for_each_slot(std::uint64_t mask, F&& f) {
        while (mask != 0) {
            const int s = std::countr_zero(mask);
            f(s);
            mask &= mask - 1;
        }
    }

  private:
    std::vector<std::vector<double>> free_;
};

}  // namespace gapsched

#endif  // GAPSCHED_SLOTS_HPP
