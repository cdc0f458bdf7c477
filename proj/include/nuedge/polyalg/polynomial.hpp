#pragma once

#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nuedge::polyalg {

/// Dense univariate polynomial with real coefficients; coeffs()[k] multiplies x^k.
///
/// Always held in canonical form: the highest stored coefficient is nonzero,
/// and the zero polynomial has no coefficients at all.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);
    Polynomial(std::initializer_list<double> coeffs);

    static Polynomial constant(double c);
    static Polynomial monomial(int power, double c = 1.0);

    /// -1 for the zero polynomial.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const noexcept { return coeffs_.empty(); }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double coeff(int power) const noexcept;

    double operator()(double x) const noexcept;
    Polynomial derivative() const;

    /// Multiply by x^k.
    Polynomial shifted_up(int k) const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

    /// Largest absolute coefficient difference; compares polynomials of different degree.
    friend double max_coeff_diff(const Polynomial& a, const Polynomial& b);

    std::string to_string(int precision = 12) const;

private:
    void canonicalize();
    std::vector<double> coeffs_;
};

}  // namespace nuedge::polyalg
