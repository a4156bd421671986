#pragma once

// The limiting cycle process: spontaneous cycles immigrate as a Poisson
// process over words, every letter of a live cycle doubles at rate one, and
// chains leave the tracked set once they grow past the truncation length.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rrg/random.hpp"
#include "rrg/word_table.hpp"

namespace rrg {

struct ImmigrationAtom {
    std::int32_t word = 0;  // index into the process's WordTable
    double birth_time = 0.0;
};

// One atom's trajectory: states[i] is occupied on [times[i], times[i+1]).
// A final state of WordTable::kBeyond means the chain outgrew the tracked
// lengths at that time.
struct Chain {
    std::vector<double> times;
    std::vector<std::int32_t> states;

    double birth() const { return times.front(); }
    std::int32_t state_at(double t) const;  // kBeyond when dead or unborn
};

struct CyclePath {
    double horizon = 0.0;
    std::vector<Chain> chains;

    // N_w(t) indexed like the WordTable.
    std::vector<std::int64_t> counts_at(const WordTable& table, double t) const;
    // N_1(t)..N_R(t), index 0 unused. Throws std::out_of_range past the horizon.
    std::vector<std::int64_t> aggregate_k(const WordTable& table, double t) const;
};

struct LimitEvent {
    enum class Kind { Immigration, Doubling, Exit };
    Kind kind;
    double time;
    std::int32_t from;  // kBeyond for immigration
    std::int32_t to;    // kBeyond for exit
};

// Every jump of the path in time order.
std::vector<LimitEvent> path_events(const CyclePath& path);

// Word-level process for a fixed d. `L` is the truncation length. Because
// lengths only increase, the law of (N_w, |w| <= R) is the same for every
// truncation L >= R, so only classes up to `resolved_length` (default L) are
// simulated; longer atoms can never feed back into the resolved coordinates.
class LimitProcess {
public:
    LimitProcess(int d, int L, std::optional<int> resolved_length = std::nullopt,
                 const EnumerationLimits& limits = {});

    int d() const { return table_.d(); }
    int truncation() const { return L_; }
    int resolved_length() const { return table_.max_length(); }
    const WordTable& table() const { return table_; }

    // Independent Poisson(1/h(w)) atoms at time 0 for every resolved class.
    std::vector<ImmigrationAtom> sample_stationary_init(Rng& rng) const;
    // Immigrants on (0, T] at rate mu(w) per class.
    std::vector<ImmigrationAtom> sample_immigration(double T, Rng& rng) const;

    // Exact event-driven simulation on [0, T]. With no init the process
    // starts stationary; pass an empty list to start from zero.
    CyclePath simulate(double T, Rng& rng, std::optional<std::vector<ImmigrationAtom>> init = std::nullopt) const;

    // Runs one chain from (word, birth) up to T.
    Chain run_chain(std::int32_t word, double birth, double T, Rng& rng) const;

private:
    int L_;
    WordTable table_;
    // Classes of one length sharing h, for the stationary draw.
    struct InitGroup {
        std::size_t first;
        std::vector<std::int32_t> members;
        double mean;  // members.size() / h
    };
    std::vector<InitGroup> init_groups_;
    // Per-length immigration: total rate mu(k) and class weights mu(w).
    struct ImmigrationLayer {
        double rate = 0.0;
        std::vector<std::int32_t> members;
        std::vector<double> weights;
    };
    std::vector<ImmigrationLayer> layers_;
};

// Outgoing rates of the stationary time reversal from state x (indexed like
// `table`, lengths 1..table.max_length() with L = table.max_length()).
struct ReversedMove {
    enum class Kind { Shrink, Death, Creation };
    Kind kind;
    std::int32_t from;  // kBeyond for creation
    std::int32_t to;    // kBeyond for death
    double rate;
};
std::vector<ReversedMove> reversed_rates(const WordTable& table, std::span<const std::int64_t> x);

// Forward rates from x for the same truncated chain (immigration mu(w),
// doubling at multiplicity, exit from the top layer).
struct ForwardMove {
    LimitEvent::Kind kind;
    std::int32_t from;
    std::int32_t to;
    double rate;
};
std::vector<ForwardMove> forward_rates(const WordTable& table, std::span<const std::int64_t> x);

// Length-level process: counts N_1..N_R with immigration at the given rates
// and Yule growth (a length-m chain jumps to m+1 at rate m).
struct LengthPath {
    double horizon = 0.0;
    // Per chain: birth time and the times of successive length increments.
    struct LengthChain {
        int start_length;
        double birth;
        std::vector<double> jumps;
    };
    std::vector<LengthChain> chains;
    int max_length = 0;

    std::vector<std::int64_t> counts_at(double t) const;  // index 1..R
    std::int64_t count_immigrants(int k, double from, double to) const;
};

class LengthProcess {
public:
    // init_means[k] and rates[k] for k = 1..R (index 0 ignored).
    LengthProcess(std::vector<double> init_means, std::vector<double> rates);

    // The aggregate of the word process for d: means a(d,k)/2k, rates mu(k).
    static LengthProcess aggregate(int d, int R);
    // Increment between levels d and d+1: means [a(d+1,k)-a(d,k)]/2k, rates nu(d,k).
    static LengthProcess increment(int d, int R);

    int max_length() const { return static_cast<int>(rates_.size()) - 1; }

    LengthPath simulate(double T, Rng& rng, bool stationary = true) const;
    // Counts N_0..N_R at each of the given times in [0, T] without storing
    // the path (result[i][k]).
    std::vector<std::vector<std::int64_t>> counts_at_times(double T, std::span<const double> times, Rng& rng,
                                                           bool stationary = true) const;

private:
    std::vector<double> init_means_;
    std::vector<double> rates_;
};

// The (d, d+1) increment process on [0, T] from stationarity.
LengthPath simulate_increment_process(int d, int R, double T, Rng& rng);

// Length of a Yule chain started at j after time dt (rate m from length m).
int yule_sample(int j, double dt, Rng& rng);

// Splits a level-d word path into the sub-path over words using only
// generators 1..inner_d and the remainder (the increment).
struct SplitPath {
    CyclePath inner;
    CyclePath increment;
};
SplitPath split_by_level(const CyclePath& path, const WordTable& table, int inner_d);

// RFC-4180 rows (replica, t, k, count) sampled on a time grid.
void write_limit_path_csv(std::ostream& out, std::span<const std::vector<std::vector<std::int64_t>>> replicas,
                          std::span<const double> times);

}  // namespace rrg
