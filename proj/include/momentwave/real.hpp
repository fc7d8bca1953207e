#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "momentwave/combinatorics.hpp"

namespace momentwave {

/// 50 decimal digits; used for reported approximations and closure values.
using Real = boost::multiprecision::cpp_bin_float_50;

Real to_real(const Rational& q);

}  // namespace momentwave
