#include "rrg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>

#include "rrg/errors.hpp"
#include "rrg/report.hpp"

namespace rrg {

GraphState::GraphState(int d) {
    if (d < 1 || d > kMaxGenerators) {
        throw std::invalid_argument("d must be in [1, " + std::to_string(kMaxGenerators) + "]");
    }
    towers_.resize(static_cast<std::size_t>(d));
}

GraphState::GraphState(std::vector<PermTower> towers) : towers_(std::move(towers)) {
    if (towers_.empty() || towers_.size() > static_cast<std::size_t>(kMaxGenerators)) {
        throw std::invalid_argument("need between 1 and " + std::to_string(kMaxGenerators) + " permutations");
    }
    for (const auto& t : towers_) {
        if (t.size() != towers_.front().size()) {
            throw std::invalid_argument("permutations have different sizes");
        }
    }
}

void GraphState::insert_vertex(std::span<const Vertex> choices) {
    if (choices.size() != towers_.size()) {
        throw std::invalid_argument("need one CRP choice per permutation");
    }
    const auto n = static_cast<Vertex>(size());
    for (Vertex c : choices) {
        if (c > n) {
            throw std::out_of_range("CRP choice outside [0, n]");
        }
    }
    for (std::size_t l = 0; l < towers_.size(); ++l) {
        towers_[l].insert(choices[l]);
    }
}

void GraphState::insert_vertex(Rng& rng) {
    for (auto& t : towers_) {
        t.insert_uniform(rng);
    }
}

void GraphState::remove_last_vertex() {
    for (auto& t : towers_) {
        t.remove_last();
    }
}

Eigen::MatrixXd GraphState::adjacency() const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& t : towers_) {
        for (Vertex v = 0; v < t.size(); ++v) {
            a(v, t.succ(v)) += 1.0;
            a(t.succ(v), v) += 1.0;
        }
    }
    return a;
}

GraphState random_graph(int d, std::size_t n, Rng& rng) {
    // n CRP steps from empty give a uniform permutation.
    GraphState g(d);
    for (std::size_t i = 0; i < n; ++i) {
        g.insert_vertex(rng);
    }
    return g;
}

std::vector<double> advance(Clock& clock, GraphState& state, double until, Rng& rng) {
    if (!(until >= clock.t)) {
        throw std::invalid_argument("cannot advance the clock backwards");
    }
    if (clock.n != state.size()) {
        throw std::logic_error("clock and graph disagree on the number of vertices");
    }
    std::vector<double> times;
    for (;;) {
        if (!clock.next_arrival) {
            clock.next_arrival = clock.t + exponential(rng, static_cast<double>(clock.n + 1));
        }
        if (*clock.next_arrival > until) {
            break;
        }
        clock.t = *clock.next_arrival;
        clock.next_arrival.reset();
        state.insert_vertex(rng);
        ++clock.n;
        times.push_back(clock.t);
    }
    clock.t = until;
    return times;
}

namespace {

std::uint64_t edge_key(Letter a, Vertex from, Vertex to, std::size_t n) {
    const Vertex tail = a.inverted() ? to : from;
    return static_cast<std::uint64_t>(a.label()) * n + tail;
}

double search_work(const GraphState& g, int K) {
    return static_cast<double>(g.size()) * std::pow(2.0 * g.d() - 1.0, K);
}

// Depth-first enumeration of simple cycles through `root` whose other vertices
// pass `allowed`. Each undirected cycle is reported once: loops only in the
// forward direction, longer cycles only when the first edge key is smaller
// than the last.
class CycleSearch {
public:
    CycleSearch(const GraphState& g, int K) : g_(g), K_(K), on_path_(g.size(), 0) {}

    template <typename Allowed, typename Emit>
    void run(Vertex root, Allowed allowed, Emit emit) {
        if (K_ < 1) {
            return;
        }
        for (int l = 0; l < g_.d(); ++l) {
            if (g_.tower(l).succ(root) == root) {
                emit(std::span<const Vertex>(&root, 1), Word{Letter::from_code(static_cast<std::uint8_t>(2 * l))});
            }
        }
        verts_.assign(1, root);
        letters_.clear();
        first_key_ = 0;
        on_path_[root] = 1;
        descend(root, allowed, emit);
        on_path_[root] = 0;
    }

private:
    template <typename Allowed, typename Emit>
    void descend(Vertex root, Allowed& allowed, Emit& emit) {
        const Vertex x = verts_.back();
        const int depth = static_cast<int>(letters_.size());
        const int alphabet = 2 * g_.d();
        for (int code = 0; code < alphabet; ++code) {
            const Letter a = Letter::from_code(static_cast<std::uint8_t>(code));
            if (depth > 0 && a == letters_.back().inverse()) {
                continue;
            }
            const Vertex y = g_.step(x, a);
            if (y == root) {
                if (depth == 0) {
                    continue;  // loops handled separately
                }
                if (first_key_ < edge_key(a, x, y, g_.size())) {
                    letters_.push_back(a);
                    emit(std::span<const Vertex>(verts_), letters_);
                    letters_.pop_back();
                }
                continue;
            }
            if (on_path_[y] || depth + 2 > K_ || !allowed(y)) {
                continue;
            }
            if (depth == 0) {
                first_key_ = edge_key(a, x, y, g_.size());
            }
            on_path_[y] = 1;
            verts_.push_back(y);
            letters_.push_back(a);
            descend(root, allowed, emit);
            letters_.pop_back();
            verts_.pop_back();
            on_path_[y] = 0;
        }
    }

    const GraphState& g_;
    int K_;
    std::vector<char> on_path_;
    std::vector<Vertex> verts_;
    Word letters_;
    std::uint64_t first_key_ = 0;
};

void check_search_budget(const GraphState& g, int K, const CycleSearchLimits& limits) {
    if (K < 0) {
        throw std::invalid_argument("cycle length bound must be nonnegative");
    }
    if (search_work(g, K) > limits.max_work) {
        throw BudgetExceeded("cycle search n*(2d-1)^K exceeds the work budget");
    }
}

template <typename Emit>
void for_each_cycle(const GraphState& g, int K, Emit emit) {
    CycleSearch search(g, K);
    for (Vertex root = 0; root < g.size(); ++root) {
        search.run(root, [root](Vertex v) { return v > root; }, emit);
    }
}

}  // namespace

std::vector<CycleRecord> find_cycles(const GraphState& state, int K, const CycleSearchLimits& limits) {
    check_search_budget(state, K, limits);
    std::vector<CycleRecord> out;
    for_each_cycle(state, K, [&](std::span<const Vertex> v, const Word& w) {
        out.push_back({std::vector<Vertex>(v.begin(), v.end()), w});
    });
    return out;
}

std::vector<CycleRecord> find_cycles_through(const GraphState& state, int K, std::span<const Vertex> roots) {
    std::vector<int> pos(state.size(), -1);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (roots[i] >= state.size()) {
            throw std::out_of_range("root vertex outside the graph");
        }
        if (pos[roots[i]] < 0) {
            pos[roots[i]] = static_cast<int>(i);
        }
    }
    std::vector<CycleRecord> out;
    CycleSearch search(state, K);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (pos[roots[i]] != static_cast<int>(i)) {
            continue;  // duplicate root
        }
        const int me = static_cast<int>(i);
        search.run(
            roots[i], [&pos, me](Vertex v) { return pos[v] < 0 || pos[v] > me; },
            [&](std::span<const Vertex> v, const Word& w) {
                out.push_back({std::vector<Vertex>(v.begin(), v.end()), w});
            });
    }
    return out;
}

WordCounts count_cycles(const GraphState& state, int K, const CycleSearchLimits& limits) {
    check_search_budget(state, K, limits);
    WordCounts out;
    for_each_cycle(state, K, [&](std::span<const Vertex>, const Word& w) { ++out[canonicalize(w)]; });
    return out;
}

LengthCounts count_cycles_by_length(const GraphState& state, int K, const CycleSearchLimits& limits) {
    check_search_budget(state, K, limits);
    LengthCounts out(static_cast<std::size_t>(K) + 1, 0);
    for_each_cycle(state, K, [&](std::span<const Vertex>, const Word& w) { ++out[w.size()]; });
    return out;
}

bool contains_cycle(const GraphState& state, const CycleRecord& cycle) {
    const std::size_t k = cycle.letters.size();
    if (k == 0 || cycle.vertices.size() != k || !is_cyclically_reduced(cycle.letters)) {
        return false;
    }
    std::set<Vertex> distinct;
    for (std::size_t i = 0; i < k; ++i) {
        const Vertex v = cycle.vertices[i];
        if (v >= state.size() || cycle.letters[i].label() >= state.d()) {
            return false;
        }
        if (!distinct.insert(v).second) {
            return false;
        }
        if (state.step(v, cycle.letters[i]) != cycle.vertices[(i + 1) % k]) {
            return false;
        }
    }
    return true;
}

LengthCounts cnbw_counts(const GraphState& state, int K, const WalkCountLimits& limits) {
    if (K < 0) {
        throw std::invalid_argument("walk length bound must be nonnegative");
    }
    const std::size_t n = state.size();
    const int alphabet = 2 * state.d();
    const std::size_t darts = n * static_cast<std::size_t>(alphabet);
    const double q = alphabet - 1.0;
    double work = 0.0;
    for (int j = 1; j <= K; ++j) {
        work += std::min(static_cast<double>(darts), std::pow(q, j - 1)) * q;
    }
    work *= static_cast<double>(darts);
    if (work > limits.max_work) {
        throw BudgetExceeded("CNBW dynamic program exceeds the work budget");
    }

    LengthCounts out(static_cast<std::size_t>(K) + 1, 0);
    out[0] = static_cast<std::int64_t>(n);
    if (K == 0 || n == 0) {
        return out;
    }

    // Dart e = v * alphabet + code runs from v along letter `code`.
    std::vector<Vertex> head(darts);
    for (Vertex v = 0; v < n; ++v) {
        for (int c = 0; c < alphabet; ++c) {
            head[v * alphabet + c] = state.step(v, Letter::from_code(static_cast<std::uint8_t>(c)));
        }
    }

    std::vector<std::int64_t> cur(darts, 0);
    std::vector<std::int64_t> nxt(darts, 0);
    std::vector<std::size_t> active;
    std::vector<std::size_t> next_active;
    for (std::size_t e0 = 0; e0 < darts; ++e0) {
        const Vertex v0 = static_cast<Vertex>(e0 / alphabet);
        const int back0 = static_cast<int>((e0 % alphabet) ^ 1U);
        active.assign(1, e0);
        cur[e0] = 1;
        for (int j = 1; j <= K; ++j) {
            std::int64_t closed = 0;
            for (std::size_t f : active) {
                if (head[f] == v0 && static_cast<int>(f % alphabet) != back0) {
                    closed += cur[f];
                }
            }
            out[j] += closed;
            if (j == K) {
                break;
            }
            next_active.clear();
            for (std::size_t f : active) {
                const std::int64_t w = cur[f];
                const int fb = static_cast<int>((f % alphabet) ^ 1U);
                const std::size_t base = static_cast<std::size_t>(head[f]) * alphabet;
                for (int c = 0; c < alphabet; ++c) {
                    if (c == fb) {
                        continue;
                    }
                    const std::size_t g = base + c;
                    if (nxt[g] == 0) {
                        next_active.push_back(g);
                    }
                    nxt[g] += w;
                }
                cur[f] = 0;
            }
            std::swap(cur, nxt);
            std::swap(active, next_active);
        }
        for (std::size_t f : active) {
            cur[f] = 0;
        }
    }
    return out;
}

std::int64_t cnbw_count(const GraphState& state, int k, const WalkCountLimits& limits) {
    return cnbw_counts(state, k, limits).at(static_cast<std::size_t>(k));
}

bool bad_walk_exists(const GraphState& state, int K) {
    const LengthCounts walks = cnbw_counts(state, K);
    const LengthCounts cycles = count_cycles_by_length(state, K);
    for (int k = 1; k <= K; ++k) {
        std::int64_t expected = 0;
        for (int j = 1; j <= k; ++j) {
            if (k % j == 0) {
                expected += 2 * j * cycles[static_cast<std::size_t>(j)];
            }
        }
        if (walks[static_cast<std::size_t>(k)] != expected) {
            return true;
        }
    }
    return false;
}

nlohmann::json to_json(const GraphState& state) {
    nlohmann::json doc;
    doc["d"] = state.d();
    doc["n"] = state.size();
    auto perms = nlohmann::json::array();
    for (int l = 0; l < state.d(); ++l) {
        perms.push_back(state.tower(l).cycles());
    }
    doc["perms"] = perms;
    return doc;
}

GraphState graph_from_json(const nlohmann::json& doc) {
    const int d = doc.at("d").get<int>();
    const auto n = doc.at("n").get<std::size_t>();
    const auto& perms = doc.at("perms");
    if (!perms.is_array() || perms.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("snapshot must list exactly d permutations");
    }
    std::vector<PermTower> towers;
    for (const auto& p : perms) {
        PermTower t = PermTower::from_cycles(p.get<Cycles>());
        if (t.size() != n) {
            throw std::invalid_argument("snapshot permutation has the wrong size");
        }
        towers.push_back(std::move(t));
    }
    if (towers.empty()) {
        throw std::invalid_argument("snapshot must have d >= 1");
    }
    return GraphState(std::move(towers));
}

void write_cycle_path_csv(std::ostream& out, std::span<const CyclePathRow> rows) {
    out << "t,k,count" << kCsvEol;
    for (const auto& r : rows) {
        out << format_double(r.t) << ',' << r.k << ',' << r.count << kCsvEol;
    }
}

CycleCountTracker::CycleCountTracker(const GraphState& state, int K)
    : K_(K), counts_(count_cycles_by_length(state, K)) {}

void CycleCountTracker::insert(GraphState& state, std::span<const Vertex> choices) {
    if (choices.size() != static_cast<std::size_t>(state.d())) {
        throw std::invalid_argument("need one CRP choice per permutation");
    }
    const std::size_t n = state.size();
    // Seating next to j splits the edge pred(j) -> j of that permutation.
    std::vector<Vertex> tails;
    std::set<std::uint64_t> split;
    for (int l = 0; l < state.d(); ++l) {
        const Vertex j = choices[static_cast<std::size_t>(l)];
        if (j > n) {
            throw std::out_of_range("CRP choice outside [0, n]");
        }
        if (j < n) {
            const Vertex p = state.tower(l).pred(j);
            tails.push_back(p);
            split.insert(static_cast<std::uint64_t>(l) * n + p);
        }
    }
    if (!tails.empty()) {
        for (const auto& c : find_cycles_through(state, K_, tails)) {
            const std::size_t k = c.letters.size();
            for (std::size_t i = 0; i < k; ++i) {
                if (split.count(edge_key(c.letters[i], c.vertices[i], c.vertices[(i + 1) % k], n))) {
                    --counts_[k];
                    break;
                }
            }
        }
    }
    state.insert_vertex(choices);
    const Vertex fresh = static_cast<Vertex>(n);
    for (const auto& c : find_cycles_through(state, K_, std::span<const Vertex>(&fresh, 1))) {
        ++counts_[c.letters.size()];
    }
}

std::vector<CyclePathRow> grow_with_path(Clock& clock, GraphState& state, double t_end, int K, Rng& rng) {
    if (!(t_end >= clock.t)) {
        throw std::invalid_argument("cannot advance the clock backwards");
    }
    if (clock.n != state.size()) {
        throw std::logic_error("clock and graph disagree on the number of vertices");
    }
    CycleCountTracker tracker(state, K);
    std::vector<CyclePathRow> rows;
    for (int k = 1; k <= K; ++k) {
        rows.push_back({clock.t, k, tracker.counts()[static_cast<std::size_t>(k)]});
    }
    std::vector<Vertex> choices(static_cast<std::size_t>(state.d()));
    for (;;) {
        if (!clock.next_arrival) {
            clock.next_arrival = clock.t + exponential(rng, static_cast<double>(clock.n + 1));
        }
        if (*clock.next_arrival > t_end) {
            break;
        }
        clock.t = *clock.next_arrival;
        clock.next_arrival.reset();
        for (auto& c : choices) {
            c = static_cast<Vertex>(uniform_index(rng, clock.n + 1));
        }
        const LengthCounts before = tracker.counts();
        tracker.insert(state, choices);
        ++clock.n;
        for (int k = 1; k <= K; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            if (tracker.counts()[kk] != before[kk]) {
                rows.push_back({clock.t, k, tracker.counts()[kk]});
            }
        }
    }
    clock.t = t_end;
    return rows;
}

}  // namespace rrg
