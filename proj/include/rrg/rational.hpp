#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace rrg {

// Exact arbitrary-precision rational used by all word statistics.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace rrg
