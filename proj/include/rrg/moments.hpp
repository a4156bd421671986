#pragma once

// Closed-form moments of the limit process: cross-time covariances of the
// length counts, Yule occupancy probabilities, and the Chebyshev-trace
// covariances built from them.

namespace rrg {

// cov(N_k(t), N_j(s)) for s <= t: (a(d,j)/2j) C(k-1, k-j) p^j (1-p)^(k-j) with
// p = e^(s-t) when k >= j, else 0. Throws std::invalid_argument when s > t.
double cov_formula(int d, int j, int k, double s, double t);

// P[a Yule chain started at j sits at k after time dt] = C(k-1,k-j) p^j (1-p)^(k-j),
// p = e^(-dt). Throws std::invalid_argument when j > k or j < 1.
double expec_alpha(int j, int k, double dt);

// d -> infinity covariance of centered tr T_i(t), tr T_k(s): delta_ik (k/2) e^(k(s-t)).
double ou_covariance(int i, int k, double s, double t);

// Exact fixed-d covariance of tr T_i(t), tr T_j(s) for s <= t:
// (1/4) (2d-1)^(-(i+j)/2) sum_{k|i, l|j} 4 l k cov(N_k(t), N_l(s)).
double chebyshev_cov_prelimit(int d, int i, int j, double s, double t);

}  // namespace rrg
