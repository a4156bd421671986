#pragma once

// Eigenvalue statistics of G(t): the shifted Chebyshev family Gamma_k whose
// traces count cyclically nonbacktracking walks, and the Mobius-inverted
// combinations f_k whose adjusted traces count cycles.

#include <iosfwd>
#include <span>
#include <vector>

#include "rrg/graph.hpp"

namespace rrg {

struct SpectralLimits {
    // Largest n for the dense symmetric eigensolver.
    std::size_t max_n = 2000;
};

// Eigenvalues of A / (2 sqrt(2d-1)), ascending.
// Throws BudgetExceeded above the cap and EigenSolverError on non-convergence.
std::vector<double> scaled_eigenvalues(const GraphState& state, const SpectralLimits& limits = {});

// T_k(x) by the three-term recurrence (valid off [-1, 1] too).
double chebyshev_t(int k, double x);

// Gamma_0 = 1, Gamma_{2k} = 2 T_{2k} + (2d-2)/(2d-1)^k, Gamma_{2k+1} = 2 T_{2k+1}.
double gamma_value(int d, int k, double x);

// sum_i Gamma_k(lambda_i) for k = 0..K (index 0 is n).
std::vector<double> gamma_traces(int d, std::span<const double> eigenvalues, int K);
std::vector<double> gamma_traces(const GraphState& state, int K, const SpectralLimits& limits = {});

// Mobius function; mobius(1) = 1.
int mobius(int n);

// Monomial coefficients, coeffs[i] multiplies x^i.
struct Polynomial {
    std::vector<double> coeffs;

    double operator()(double x) const;
    int degree() const;
};

Polynomial chebyshev_t_poly(int k);
Polynomial gamma_poly(int d, int k);

// f = sum_j coeffs[j] Gamma_j for a fixed d.
struct GammaExpansion {
    int d = 1;
    std::vector<double> coeffs;

    double operator()(double x) const;
    Polynomial to_monomial() const;
    // sum_i f(lambda_i) - n a_0, given the Gamma traces of a state.
    double adjusted_trace(std::span<const double> traces) const;
};

// Rewrites a monomial polynomial in the Gamma basis.
GammaExpansion gamma_expand(int d, const Polynomial& f);

// f_k = (1/2k) sum_{j|k} mu(k/j) (2d-1)^{j/2} Gamma_j. Requires k >= 1.
GammaExpansion f_basis_gamma(int d, int k);
Polynomial f_basis(int d, int k);

// Adjusted trace sum_i f(lambda_i) - n a_0.
double tr_poly(const GraphState& state, const GammaExpansion& f, const SpectralLimits& limits = {});
double tr_poly(const GraphState& state, const Polynomial& f, const SpectralLimits& limits = {});

// tr f_k for k = 1..K from one eigendecomposition (index 0 is zero).
std::vector<double> tr_f_all(const GraphState& state, int K, const SpectralLimits& limits = {});

// RFC-4180 table k, gamma_trace, cnbw for k = 1..K.
void write_trace_table_csv(std::ostream& out, const GraphState& state, int K, const SpectralLimits& limits = {});

}  // namespace rrg
