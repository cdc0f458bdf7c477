#pragma once

#include <span>
#include <string>
#include <vector>

#include "nuedge/polyalg/polynomial.hpp"

namespace nuedge::polyalg {

/// What the formal small parameter stands for.
enum class EpsilonRole { InvB, InvSqrtN, InvSigma };

std::string to_string(EpsilonRole role);

/// Formal power series sum_k eps^k P_k(x) truncated after eps^order.
///
/// Coefficients are polynomials in x. Trailing zero coefficients are dropped,
/// so terms().size() <= order + 1 and equal series compare equal.
class TruncatedSeries {
public:
    TruncatedSeries(int order, EpsilonRole role);
    TruncatedSeries(std::vector<Polynomial> terms, int order, EpsilonRole role);

    static TruncatedSeries constant(Polynomial p, int order, EpsilonRole role);
    static TruncatedSeries one(int order, EpsilonRole role);
    /// c * eps^power (polynomial coefficient p).
    static TruncatedSeries monomial(int power, Polynomial p, int order, EpsilonRole role);

    int order() const noexcept { return order_; }
    EpsilonRole role() const noexcept { return role_; }
    std::span<const Polynomial> terms() const noexcept { return terms_; }
    /// Coefficient of eps^k; the zero polynomial past the stored terms.
    const Polynomial& term(int k) const noexcept;
    bool has_zero_constant_term() const noexcept { return term(0).is_zero(); }

    /// Drop powers above new_order (new_order <= order()).
    TruncatedSeries truncated(int new_order) const;

    /// sum_k eps^k P_k(x).
    double evaluate(double eps, double x) const noexcept;

    TruncatedSeries& operator+=(const TruncatedSeries& rhs);
    TruncatedSeries& operator-=(const TruncatedSeries& rhs);
    TruncatedSeries& operator*=(double s);

    friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
    friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }
    friend TruncatedSeries operator*(TruncatedSeries a, double s) { return a *= s; }
    friend TruncatedSeries operator*(double s, TruncatedSeries a) { return a *= s; }
    /// Multiplies every coefficient by p.
    friend TruncatedSeries operator*(const TruncatedSeries& a, const Polynomial& p);
    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);

    friend bool operator==(const TruncatedSeries&, const TruncatedSeries&) = default;

    TruncatedSeries pow(int k) const;

private:
    void trim();
    void check_compatible(const TruncatedSeries& other, const char* op) const;

    std::vector<Polynomial> terms_;
    int order_;
    EpsilonRole role_;
};

/// Cauchy product truncated at the common order. Mismatched order or role is a
/// contract violation.
TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b);

/// (1 + y)^a for a series y with zero constant term.
TruncatedSeries binomial_series(const TruncatedSeries& y, double a);

/// p(x + eta) expanded by Taylor's formula; eta must have zero constant term.
TruncatedSeries taylor_shift(const Polynomial& p, const TruncatedSeries& eta);

struct GaussianShift {
    /// phi(x + eta) = phi(x) * phi_series
    TruncatedSeries phi_series;
    /// Phi(x + eta) = Phi(x) + phi(x) * Phi_series
    TruncatedSeries Phi_series;
};

/// Taylor expansion of the normal density and distribution function at a
/// shifted argument, using phi^(k) = (-1)^k H_k phi. Keeps Taylor terms up to
/// eta^s_max.
GaussianShift series_compose_gaussian_shift(const TruncatedSeries& eta, int s_max);

}  // namespace nuedge::polyalg
