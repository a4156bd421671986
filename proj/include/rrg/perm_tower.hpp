#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrg/random.hpp"

namespace rrg {

using Vertex = std::uint32_t;
using Cycles = std::vector<std::vector<Vertex>>;

// A permutation of {0, ..., n-1} grown by the Chinese restaurant process.
// Cycles are kept as doubly linked lists so that seating a new customer and
// removing the newest one are O(1).
class PermTower {
public:
    PermTower() = default;

    // succ[v] = pi(v). Throws std::invalid_argument if succ is not a permutation.
    static PermTower from_successors(std::vector<Vertex> succ);
    // Cycle notation; every element of [0, n) must occur exactly once.
    static PermTower from_cycles(const Cycles& cycles);

    std::size_t size() const { return succ_.size(); }
    Vertex succ(Vertex v) const { return succ_[v]; }
    Vertex pred(Vertex v) const { return pred_[v]; }
    std::span<const Vertex> successors() const { return succ_; }

    // Seats customer n. choice < n puts it immediately to the left of
    // customer `choice` (so pi(n) = choice); choice == n opens a new table.
    // Throws std::out_of_range for choice > n.
    void insert(Vertex choice);
    void insert_uniform(Rng& rng);
    // Deletes the newest element from its cycle. Requires size() > 0.
    void remove_last();

    // Cycles, each rotated to start at its least element, ordered by that element.
    Cycles cycles() const;

    bool operator==(const PermTower&) const = default;

private:
    std::vector<Vertex> succ_;
    std::vector<Vertex> pred_;
};

// Value-returning form of PermTower::insert.
PermTower crp_step(PermTower tower, Vertex choice);

}  // namespace rrg
