#pragma once

#include "nuedge/polyalg/polynomial.hpp"

namespace nuedge::polyalg {

inline constexpr int kMaxHermiteDegree = 64;

/// Probabilists' Hermite polynomial H_k, i.e. (-1)^k H_k(x) phi(x) = phi^(k)(x).
/// Throws DegreeOverflow for k > 64.
const Polynomial& hermite(int k);

/// Standard normal density and distribution function.
double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;

}  // namespace nuedge::polyalg
