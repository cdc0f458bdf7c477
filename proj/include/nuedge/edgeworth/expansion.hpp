#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "nuedge/polyalg/polynomial.hpp"
#include "nuedge/polyalg/series.hpp"

namespace nuedge::edgeworth {

using polyalg::Polynomial;
using polyalg::TruncatedSeries;

/// Cumulants gamma_1..gamma_jmax of S_n or of W_n = S_n / sigma_n.
struct CumulantVector {
    std::vector<double> gamma;  // gamma[j-1] = gamma_j
    std::string subject = "S_n";
    double sigma_n = 1.0;

    int max_order() const noexcept { return static_cast<int>(gamma.size()); }
    /// gamma_j; zero beyond max_order().
    double operator()(int j) const;
    /// Cumulants of W_n: gamma_j(S_n) sigma_n^{-j}.
    CumulantVector standardized() const;
    /// c_j = gamma_{j+2}(S_n) / sigma_n^2 for j = 1..r.
    std::vector<double> reduced(int r) const;
};

struct NormalizationPair {
    double A_n = 0.0;
    double B_n = 1.0;
    double sigma_n = 1.0;

    double a_n() const noexcept { return B_n / sigma_n; }
    double v_n() const noexcept { return A_n / sigma_n; }
};

/// Psi(x) = Phi(x) + phi(x) sum_j B_n^{-j} polys[j-1](x).
///
/// The stored polynomials always enter with a plus sign. classical(j) returns
/// the polynomial in the subtractive convention Phi - phi sum eps^j H_j, where
/// eps = scale / B_n is the natural small parameter of the construction.
struct ExpansionPolynomials {
    std::vector<Polynomial> polys;
    NormalizationPair normalization;
    double scale = 1.0;

    int order() const noexcept { return static_cast<int>(polys.size()); }
    Polynomial classical(int j) const;
};

/// Asymptotic cumulant coefficients: gamma_k(S_n) = n p_k + q_k + O(delta^n).
struct StationaryCoefficients {
    std::vector<double> p;  // p[0] = p_2
    std::vector<double> q;  // q[0] = q_2
    double c = 0.0;
    double delta = 0.0;
    bool degenerate_variance = false;

    int max_order() const noexcept { return static_cast<int>(std::max(p.size(), q.size())) + 1; }
    /// p_k; zero for k beyond the stored range.
    double p_at(int k) const;
    double q_at(int k) const;
};

/// Self-normalized polynomials from reduced cumulants c_j = gamma_{j+2}(S_n)/sigma_n^2.
/// Normalization is B_n = sigma_n = 1 until the caller sets it.
ExpansionPolynomials selfnorm_polynomials(const std::vector<double>& reduced, int r);

/// n-independent polynomials in powers of 1/sigma_n, retaining powers <= m-2.
ExpansionPolynomials stationary_polynomials(const StationaryCoefficients& coeffs, int r, int m);

/// Polynomials in powers of n^{-1/2} for (S_n - c) / sqrt(p_2 n).
/// Stored against B_n = sqrt(p_2 n) with scale = sqrt(p_2).
ExpansionPolynomials sqrtn_polynomials(const StationaryCoefficients& coeffs, int r, int m);

/// Re-expands Psi(a_n x + v_n) in powers of 1/B_n, given a_n - 1 and v_n as
/// series in 1/B_n. The input polynomials are read as coefficients of
/// sigma_n^{-j} = B_n^{-j} a_n^j.
ExpansionPolynomials affine_recompose(const ExpansionPolynomials& polys, const TruncatedSeries& u_series,
                                      const TruncatedSeries& v_series, int m);

/// Phi(x) + phi(x) sum_{j<=r} B_n^{-j} polys_j(x).
double evaluate_expansion(const ExpansionPolynomials& polys, int r, double x);

/// Closed-form tail envelope: |Psi(x) - 1{x>0}| <= amp (1 + |x|^degree) phi(x)
/// for |x| >= 1.
struct TailEnvelope {
    double amplitude = 0.0;
    int degree = 0;
};
TailEnvelope expansion_tail(const ExpansionPolynomials& polys, int r);

}  // namespace nuedge::edgeworth
