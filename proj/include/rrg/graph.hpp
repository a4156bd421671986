#pragma once

// The growing 2d-regular multigraph G(t) built from d Chinese-restaurant
// towers, with exact short-cycle and cyclically-nonbacktracking-walk counts.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "rrg/perm_tower.hpp"
#include "rrg/random.hpp"
#include "rrg/words.hpp"

namespace rrg {

using WordCounts = std::map<WordClass, std::int64_t>;
// Index k holds the count for length k; index 0 is unused unless documented.
using LengthCounts = std::vector<std::int64_t>;

class GraphState {
public:
    explicit GraphState(int d = 1);
    explicit GraphState(std::vector<PermTower> towers);

    int d() const { return static_cast<int>(towers_.size()); }
    std::size_t size() const { return towers_.front().size(); }
    const PermTower& tower(int label) const { return towers_[static_cast<std::size_t>(label)]; }

    // Follows one letter: pi_l(v) or pi_l^{-1}(v).
    Vertex step(Vertex v, Letter letter) const {
        const PermTower& t = towers_[static_cast<std::size_t>(letter.label())];
        return letter.inverted() ? t.pred(v) : t.succ(v);
    }

    // One CRP step per tower with the given choices (one per tower).
    void insert_vertex(std::span<const Vertex> choices);
    void insert_vertex(Rng& rng);
    void remove_last_vertex();

    // A = sum_l (P_l + P_l^T); loops contribute 2 on the diagonal.
    Eigen::MatrixXd adjacency() const;

    bool operator==(const GraphState&) const = default;

private:
    std::vector<PermTower> towers_;
};

// d independent uniform permutations of [n].
GraphState random_graph(int d, std::size_t n, Rng& rng);

// Poissonized insertion clock: from size m the next vertex arrives after an
// Exp(m+1) holding time. The pending arrival is kept so that advancing in
// several chunks realizes the same trajectory as one long advance.
struct Clock {
    double t = 0.0;
    std::size_t n = 0;
    std::optional<double> next_arrival;
};

// Inserts every vertex arriving in (clock.t, until]; returns the insertion times.
std::vector<double> advance(Clock& clock, GraphState& state, double until, Rng& rng);

// A closed walk s_0 -w_1-> s_1 -> ... -w_k-> s_k = s_0 on labeled vertices.
struct CycleRecord {
    std::vector<Vertex> vertices;  // s_0 .. s_{k-1}
    Word letters;                  // w_1 .. w_k

    int length() const { return static_cast<int>(letters.size()); }
    WordClass word_class() const { return canonicalize(letters); }
};

struct CycleSearchLimits {
    // Bound on n * (2d-1)^K.
    double max_work = 2e10;
};

// Every simple cycle of length <= K, each reported once (rooted at its least
// vertex, oriented so the first edge precedes the last in (label, tail) order).
std::vector<CycleRecord> find_cycles(const GraphState& state, int K, const CycleSearchLimits& limits = {});

// Cycles of length <= K through at least one vertex of `roots`, each reported
// once, rooted at the first vertex of `roots` (in the given order) it contains.
std::vector<CycleRecord> find_cycles_through(const GraphState& state, int K, std::span<const Vertex> roots);

WordCounts count_cycles(const GraphState& state, int K, const CycleSearchLimits& limits = {});
// C_1..C_K (index 0 is zero).
LengthCounts count_cycles_by_length(const GraphState& state, int K, const CycleSearchLimits& limits = {});

bool contains_cycle(const GraphState& state, const CycleRecord& cycle);

struct WalkCountLimits {
    // Bound on (2dn) * sum_j min(2dn, (2d-1)^j) * (2d-1).
    double max_work = 5e10;
};

// Closed cyclically nonbacktracking walks of each length 0..K (index 0 holds n).
LengthCounts cnbw_counts(const GraphState& state, int K, const WalkCountLimits& limits = {});
std::int64_t cnbw_count(const GraphState& state, int k, const WalkCountLimits& limits = {});

// True iff for some k <= K the CNBW count differs from sum_{j|k} 2j C_j.
bool bad_walk_exists(const GraphState& state, int K);

// Snapshot document {d, n, perms: [[cycle, ...], ...]} with 0-based vertices.
nlohmann::json to_json(const GraphState& state);
GraphState graph_from_json(const nlohmann::json& doc);

// (t, k, C_k) rows, RFC-4180.
struct CyclePathRow {
    double t;
    int k;
    std::int64_t count;
};
void write_cycle_path_csv(std::ostream& out, std::span<const CyclePathRow> rows);

// Tracks C_1..C_K along a growing graph, updating only the cycles touched by
// each insertion.
class CycleCountTracker {
public:
    CycleCountTracker(const GraphState& state, int K);

    // Inserts one vertex with the given per-tower choices and updates counts.
    void insert(GraphState& state, std::span<const Vertex> choices);
    const LengthCounts& counts() const { return counts_; }

private:
    int K_;
    LengthCounts counts_;
};

// Runs the Poissonized growth up to t_end, recording a row for every length
// whose count changes at an insertion (plus the initial counts at clock.t).
std::vector<CyclePathRow> grow_with_path(Clock& clock, GraphState& state, double t_end, int K, Rng& rng);

}  // namespace rrg
