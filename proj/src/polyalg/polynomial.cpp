#include "nuedge/polyalg/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nuedge/error.hpp"

namespace nuedge::polyalg {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    canonicalize();
}

Polynomial::Polynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) {
    canonicalize();
}

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(int power, double c) {
    require(power >= 0, "monomial power must be nonnegative");
    std::vector<double> v(static_cast<std::size_t>(power) + 1, 0.0);
    v.back() = c;
    return Polynomial(std::move(v));
}

void Polynomial::canonicalize() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::coeff(int power) const noexcept {
    if (power < 0 || power > degree()) return 0.0;
    return coeffs_[static_cast<std::size_t>(power)];
}

double Polynomial::operator()(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted_up(int k) const {
    if (is_zero() || k == 0) return *this;
    std::vector<double> v(static_cast<std::size_t>(k), 0.0);
    v.insert(v.end(), coeffs_.begin(), coeffs_.end());
    return Polynomial(std::move(v));
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] += rhs.coeffs_[k];
    canonicalize();
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (rhs.coeffs_.size() > coeffs_.size()) coeffs_.resize(rhs.coeffs_.size(), 0.0);
    for (std::size_t k = 0; k < rhs.coeffs_.size(); ++k) coeffs_[k] -= rhs.coeffs_[k];
    canonicalize();
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    canonicalize();
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(out));
}

double max_coeff_diff(const Polynomial& a, const Polynomial& b) {
    const int top = std::max(a.degree(), b.degree());
    double worst = 0.0;
    for (int k = 0; k <= top; ++k) worst = std::max(worst, std::abs(a.coeff(k) - b.coeff(k)));
    return worst;
}

std::string Polynomial::to_string(int precision) const {
    if (is_zero()) return "0";
    std::string out;
    char buf[64];
    for (int k = 0; k <= degree(); ++k) {
        const double c = coeffs_[static_cast<std::size_t>(k)];
        if (c == 0.0) continue;
        if (!out.empty()) out += c < 0 ? " - " : " + ";
        else if (c < 0) out += "-";
        std::snprintf(buf, sizeof buf, "%.*g", precision, std::abs(c));
        out += buf;
        if (k == 1) out += "*x";
        else if (k > 1) out += "*x^" + std::to_string(k);
    }
    return out;
}

}  // namespace nuedge::polyalg
