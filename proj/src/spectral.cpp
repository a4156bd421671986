#include "rrg/spectral.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "rrg/errors.hpp"
#include "rrg/report.hpp"

namespace rrg {

std::vector<double> scaled_eigenvalues(const GraphState& state, const SpectralLimits& limits) {
    if (state.size() > limits.max_n) {
        throw BudgetExceeded("graph too large for the dense eigensolver");
    }
    if (state.size() == 0) {
        return {};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(state.adjacency(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw EigenSolverError("symmetric eigensolver did not converge");
    }
    const double scale = 2.0 * std::sqrt(2.0 * state.d() - 1.0);
    std::vector<double> out(static_cast<std::size_t>(solver.eigenvalues().size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = solver.eigenvalues()[static_cast<Eigen::Index>(i)] / scale;
    }
    return out;
}

double chebyshev_t(int k, double x) {
    if (k < 0) {
        throw std::invalid_argument("Chebyshev degree must be nonnegative");
    }
    double prev = 1.0;
    double cur = x;
    if (k == 0) {
        return prev;
    }
    for (int i = 1; i < k; ++i) {
        const double next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace {

double gamma_shift(int d, int k) {
    if (k == 0 || k % 2 != 0) {
        return 0.0;
    }
    return (2.0 * d - 2.0) / std::pow(2.0 * d - 1.0, k / 2);
}

void check_d(int d) {
    if (d < 1) {
        throw std::invalid_argument("d must be positive");
    }
}

}  // namespace

double gamma_value(int d, int k, double x) {
    check_d(d);
    if (k == 0) {
        return 1.0;
    }
    return 2.0 * chebyshev_t(k, x) + gamma_shift(d, k);
}

std::vector<double> gamma_traces(int d, std::span<const double> eigenvalues, int K) {
    check_d(d);
    if (K < 0) {
        throw std::invalid_argument("K must be nonnegative");
    }
    std::vector<double> out(static_cast<std::size_t>(K) + 1, 0.0);
    out[0] = static_cast<double>(eigenvalues.size());
    // T_k summed over eigenvalues, advancing all recurrences together.
    std::vector<double> prev(eigenvalues.size(), 1.0);
    std::vector<double> cur(eigenvalues.begin(), eigenvalues.end());
    for (int k = 1; k <= K; ++k) {
        double sum = 0.0;
        for (double t : cur) {
            sum += t;
        }
        out[static_cast<std::size_t>(k)] = 2.0 * sum + gamma_shift(d, k) * static_cast<double>(eigenvalues.size());
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const double next = 2.0 * eigenvalues[i] * cur[i] - prev[i];
            prev[i] = cur[i];
            cur[i] = next;
        }
    }
    return out;
}

std::vector<double> gamma_traces(const GraphState& state, int K, const SpectralLimits& limits) {
    const auto eig = scaled_eigenvalues(state, limits);
    return gamma_traces(state.d(), eig, K);
}

int mobius(int n) {
    if (n < 1) {
        throw std::invalid_argument("mobius needs a positive argument");
    }
    int result = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) {
                return 0;
            }
            result = -result;
        }
    }
    if (n > 1) {
        result = -result;
    }
    return result;
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

int Polynomial::degree() const {
    for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
        if (coeffs[static_cast<std::size_t>(i)] != 0.0) {
            return i;
        }
    }
    return -1;
}

Polynomial chebyshev_t_poly(int k) {
    if (k < 0) {
        throw std::invalid_argument("Chebyshev degree must be nonnegative");
    }
    std::vector<double> prev{1.0};
    std::vector<double> cur{0.0, 1.0};
    if (k == 0) {
        return {prev};
    }
    for (int i = 1; i < k; ++i) {
        std::vector<double> next(cur.size() + 1, 0.0);
        for (std::size_t j = 0; j < cur.size(); ++j) {
            next[j + 1] += 2.0 * cur[j];
        }
        for (std::size_t j = 0; j < prev.size(); ++j) {
            next[j] -= prev[j];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return {cur};
}

Polynomial gamma_poly(int d, int k) {
    check_d(d);
    if (k == 0) {
        return {{1.0}};
    }
    Polynomial p = chebyshev_t_poly(k);
    for (auto& c : p.coeffs) {
        c *= 2.0;
    }
    p.coeffs[0] += gamma_shift(d, k);
    return p;
}

double GammaExpansion::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] != 0.0) {
            acc += coeffs[j] * gamma_value(d, static_cast<int>(j), x);
        }
    }
    return acc;
}

Polynomial GammaExpansion::to_monomial() const {
    Polynomial out{std::vector<double>(std::max<std::size_t>(coeffs.size(), 1), 0.0)};
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] == 0.0) {
            continue;
        }
        const Polynomial g = gamma_poly(d, static_cast<int>(j));
        for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
            out.coeffs[i] += coeffs[j] * g.coeffs[i];
        }
    }
    return out;
}

double GammaExpansion::adjusted_trace(std::span<const double> traces) const {
    if (traces.size() < coeffs.size()) {
        throw std::invalid_argument("not enough Gamma traces for this expansion");
    }
    // sum_i f(lambda_i) = sum_j a_j traces[j], and traces[0] = n cancels a_0.
    double acc = 0.0;
    for (std::size_t j = 1; j < coeffs.size(); ++j) {
        acc += coeffs[j] * traces[j];
    }
    return acc;
}

GammaExpansion gamma_expand(int d, const Polynomial& f) {
    check_d(d);
    std::vector<double> rest = f.coeffs;
    const int deg = f.degree();
    GammaExpansion out{d, std::vector<double>(static_cast<std::size_t>(std::max(deg, 0)) + 1, 0.0)};
    // Gamma_j has leading coefficient 2^j for j >= 1; peel off from the top.
    for (int j = deg; j >= 1; --j) {
        const double a = rest[static_cast<std::size_t>(j)] / std::ldexp(1.0, j);
        out.coeffs[static_cast<std::size_t>(j)] = a;
        const Polynomial g = gamma_poly(d, j);
        for (std::size_t i = 0; i < g.coeffs.size(); ++i) {
            rest[i] -= a * g.coeffs[i];
        }
    }
    if (deg >= 0) {
        out.coeffs[0] = rest[0];
    }
    return out;
}

GammaExpansion f_basis_gamma(int d, int k) {
    check_d(d);
    if (k < 1) {
        throw std::invalid_argument("f_k needs k >= 1");
    }
    GammaExpansion out{d, std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0)};
    const double q = 2.0 * d - 1.0;
    for (int j = 1; j <= k; ++j) {
        if (k % j == 0) {
            out.coeffs[static_cast<std::size_t>(j)] = mobius(k / j) * std::pow(q, j / 2.0) / (2.0 * k);
        }
    }
    return out;
}

Polynomial f_basis(int d, int k) { return f_basis_gamma(d, k).to_monomial(); }

double tr_poly(const GraphState& state, const GammaExpansion& f, const SpectralLimits& limits) {
    if (f.d != state.d()) {
        throw std::invalid_argument("expansion built for a different d");
    }
    const auto traces = gamma_traces(state, static_cast<int>(f.coeffs.size()) - 1, limits);
    return f.adjusted_trace(traces);
}

double tr_poly(const GraphState& state, const Polynomial& f, const SpectralLimits& limits) {
    return tr_poly(state, gamma_expand(state.d(), f), limits);
}

std::vector<double> tr_f_all(const GraphState& state, int K, const SpectralLimits& limits) {
    const auto traces = gamma_traces(state, K, limits);
    std::vector<double> out(static_cast<std::size_t>(K) + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
        out[static_cast<std::size_t>(k)] = f_basis_gamma(state.d(), k).adjusted_trace(traces);
    }
    return out;
}

void write_trace_table_csv(std::ostream& out, const GraphState& state, int K, const SpectralLimits& limits) {
    const auto traces = gamma_traces(state, K, limits);
    const auto walks = cnbw_counts(state, K);
    out << "k,gamma_trace,cnbw" << kCsvEol;
    for (int k = 1; k <= K; ++k) {
        out << k << ',' << format_double(traces[static_cast<std::size_t>(k)]) << ','
            << walks[static_cast<std::size_t>(k)] << kCsvEol;
    }
}

}  // namespace rrg
