#include "rrg/moments.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/binomial.hpp>

#include "rrg/words.hpp"

namespace rrg {

namespace {

double occupancy(int j, int k, double p) {
    const double binom = boost::math::binomial_coefficient<double>(static_cast<unsigned>(k - 1),
                                                                   static_cast<unsigned>(k - j));
    return binom * std::pow(p, j) * std::pow(1.0 - p, k - j);
}

void check_order(double s, double t) {
    if (s > t) {
        throw std::invalid_argument("covariance needs s <= t");
    }
}

}  // namespace

double cov_formula(int d, int j, int k, double s, double t) {
    check_order(s, t);
    if (j < 1 || k < 1) {
        throw std::invalid_argument("lengths must be positive");
    }
    if (k < j) {
        return 0.0;
    }
    const double mean = static_cast<double>(a_count(d, j)) / (2.0 * j);
    return mean * occupancy(j, k, std::exp(s - t));
}

double expec_alpha(int j, int k, double dt) {
    if (j < 1 || j > k) {
        throw std::invalid_argument("expec_alpha needs 1 <= j <= k");
    }
    if (dt < 0.0) {
        throw std::invalid_argument("elapsed time must be nonnegative");
    }
    return occupancy(j, k, std::exp(-dt));
}

double ou_covariance(int i, int k, double s, double t) {
    check_order(s, t);
    if (i != k) {
        return 0.0;
    }
    return 0.5 * k * std::exp(k * (s - t));
}

double chebyshev_cov_prelimit(int d, int i, int j, double s, double t) {
    check_order(s, t);
    double sum = 0.0;
    for (int k = 1; k <= i; ++k) {
        if (i % k != 0) {
            continue;
        }
        for (int l = 1; l <= j; ++l) {
            if (j % l == 0) {
                sum += 4.0 * l * k * cov_formula(d, l, k, s, t);
            }
        }
    }
    return 0.25 * std::pow(2.0 * d - 1.0, -(i + j) / 2.0) * sum;
}

}  // namespace rrg
