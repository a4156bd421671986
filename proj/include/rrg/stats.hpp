#pragma once

// Validation harness: exact enumeration oracles, Poisson references, total
// variation estimates, the size-biased conditioned sampler, and the Monte
// Carlo comparisons between the graph process and its limit.

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rrg/graph.hpp"
#include "rrg/limitproc.hpp"
#include "rrg/rational.hpp"
#include "rrg/report.hpp"

namespace rrg {

// ---- chi-square ----------------------------------------------------------

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int cells = 0;  // after pooling
};

// Goodness of fit of observed counts to cell probabilities (which should sum
// to one; any missing mass is added to the last cell). Adjacent cells are
// pooled left to right until each expected count is at least 5.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed, std::span<const double> probs);

// Fit of integer samples to Poisson(mean), tail pooled into the last cell.
ChiSquareResult poisson_gof(std::span<const std::int64_t> samples, double mean);

// Two-sample homogeneity over the same cells, pooling sparse cells.
ChiSquareResult chi_square_homogeneity(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

// ---- exact oracles -------------------------------------------------------

// Joint law of (C_1, ..., C_r); keys have size r + 1 with key[0] = 0.
struct JointLaw {
    std::map<std::vector<int>, std::int64_t> weight;
    std::int64_t total = 0;

    double probability(const std::vector<int>& key) const;
};

struct OracleLimits {
    double max_tuples = 1e7;  // (n!)^d
};

// Enumerates every d-tuple of permutations of [n].
JointLaw exact_cycle_distribution(int n, int d, int r, const OracleLimits& limits = {});

// E C_w for every class with |w| <= K, by the same enumeration.
std::map<WordClass, Rational> exact_word_means(int n, int d, int K, const OracleLimits& limits = {});

// ([n]_k / h(w)) prod_i 1/[n]_{e_i}; zero when |w| > n.
Rational exact_class_mean(int n, int d, const WordClass& w);

// 1/[n]_k for a fixed labeled cycle of length k.
Rational labeled_cycle_mean(int n, int k);

// E C_k(t), k = 0..K, for the Poissonized graph grown from empty: mixes the
// exact class means over P[N_t = m] = e^-t (1 - e^-t)^m. Throws BudgetExceeded
// when the geometric tail needs more than `max_terms` sizes.
std::vector<double> poissonized_cycle_means(int d, int K, double t, double max_terms = 5e7);

// ---- Poisson reference and total variation -------------------------------

struct PoissonReference {
    std::vector<double> means;  // index k = 1..r, index 0 unused

    static PoissonReference aggregate(int d, int r);  // a(d,k)/2k
    int r() const { return static_cast<int>(means.size()) - 1; }
    double pmf(const std::vector<int>& key) const;
};

// Exact TV between an enumerated law and the independent Poisson reference
// (the reference's mass off the law's support is accounted for exactly).
double exact_tv(const JointLaw& law, const PoissonReference& ref);

struct TvReport {
    int d = 0;
    int n = 0;
    int r = 0;
    std::int64_t samples = 0;
    double estimate = 0.0;        // plug-in
    double stderr_ = 0.0;         // bootstrap
    double bias_corrected = 0.0;  // 2 * plug-in - bootstrap mean
    double bound_shape = 0.0;     // (2d-1)^(2r-1) / n
};

struct TvOptions {
    int max_count = 10;  // support truncation per coordinate
    int bootstrap = 200;
    std::int64_t min_samples = 10000;
};

// Samples are count vectors with index 0 unused. Throws std::invalid_argument
// below the minimum sample size.
TvReport empirical_tv(std::span<const std::vector<int>> samples, const PoissonReference& ref, Rng& rng,
                      const TvOptions& options = {});

// (C_1..C_r) of `replicas` independent G_n draws, replica i seeded by stream i.
std::vector<std::vector<int>> sample_cycle_counts(int d, int n, int r, std::int64_t replicas, std::uint64_t seed,
                                                  unsigned threads);

// ---- conditioned sampler and overlap --------------------------------------

// Forces the labeled cycle alpha into `base` by transposing images:
// pi_l <- (pi_l(a) b) pi_l for each required pi_l(a) = b. If base is uniform,
// the result is uniform conditioned on containing alpha.
// Throws std::invalid_argument for a malformed alpha.
GraphState sample_conditioned(const GraphState& base, const CycleRecord& alpha);
GraphState sample_conditioned(int d, std::size_t n, const CycleRecord& alpha, Rng& rng);

// P[two distinct cycles of length <= r share a vertex] in G_n, by Monte Carlo.
double overlap_probability(int d, int n, int r, std::int64_t replicas, std::uint64_t seed, unsigned threads);

// ---- process comparisons -------------------------------------------------

struct MomentEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
};
MomentEstimate sample_mean(std::span<const double> x);
// Covariance with a delta-method standard error.
MomentEstimate sample_cov(std::span<const double> x, std::span<const double> y);

GateResult z_gate(std::string statistic, double formula, const MomentEstimate& est, double sigmas = 3.0);

struct CompareOptions {
    int d = 2;
    int K = 3;
    double s = 8.0;
    std::vector<double> deltas{0.25, 1.0};
    std::int64_t replicas = 20000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool covariances = true;
};

// Grows G from empty to time s (and s + delta), comparing E C_k(s) with
// a(d,k)/2k and cov(C_k(s+delta), C_j(s)) with the limit covariance.
Report graph_vs_limit(const CompareOptions& options);

struct OuScanOptions {
    std::vector<int> d_list{2, 5, 10, 20};
    std::vector<int> k_list{1, 2, 3};
    double s = 0.0;
    double t = 0.0;
    std::int64_t replicas = 20000;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::vector<int> monte_carlo_d{10};  // d values also checked by simulation
};

// Exact fixed-d Chebyshev-trace covariances against the OU limit, plus Monte
// Carlo agreement with the exact values at the selected d.
Report ou_limit_scan(const OuScanOptions& options);

// tr T_i for i = 1..R from length counts: (1/2)(2d-1)^(-i/2) sum_{k|i} 2k N_k.
std::vector<double> chebyshev_traces(int d, std::span<const std::int64_t> counts);

}  // namespace rrg
