#pragma once

// Text form used by CLI input files: one term per line,
//
//   coeff * x1^a1 x2^a2 ... xd^ad
//
// Coefficients are integers, fractions p/q, or decimals. Variables with a
// zero exponent may be omitted, `^1` may be omitted, and `*` between factors
// is optional. Several terms may share a line when joined by + or -.
// Blank lines and text after '#' are ignored.

#include <istream>
#include <string>
#include <string_view>

#include "dunkl/polynomial.hpp"

namespace dunkl {

RationalPolynomial parse_polynomial(std::string_view text, int dimension);
RationalPolynomial read_polynomial(std::istream& in, int dimension);

std::string format_polynomial(const RationalPolynomial& p);
std::string format_polynomial(const Polynomial& p);

}  // namespace dunkl
