#include "nuedge/polyalg/series.hpp"

#include <algorithm>

#include "nuedge/error.hpp"
#include "nuedge/polyalg/hermite.hpp"

namespace nuedge::polyalg {

namespace {
const Polynomial kZero{};
}

std::string to_string(EpsilonRole role) {
    switch (role) {
        case EpsilonRole::InvB: return "1/B_n";
        case EpsilonRole::InvSqrtN: return "n^{-1/2}";
        case EpsilonRole::InvSigma: return "1/sigma_n";
    }
    return "?";
}

TruncatedSeries::TruncatedSeries(int order, EpsilonRole role) : order_(order), role_(role) {
    require(order >= 0, "series order must be nonnegative");
}

TruncatedSeries::TruncatedSeries(std::vector<Polynomial> terms, int order, EpsilonRole role)
    : terms_(std::move(terms)), order_(order), role_(role) {
    require(order >= 0, "series order must be nonnegative");
    if (terms_.size() > static_cast<std::size_t>(order) + 1) terms_.resize(static_cast<std::size_t>(order) + 1);
    trim();
}

TruncatedSeries TruncatedSeries::constant(Polynomial p, int order, EpsilonRole role) {
    return TruncatedSeries({std::move(p)}, order, role);
}

TruncatedSeries TruncatedSeries::one(int order, EpsilonRole role) {
    return constant(Polynomial::constant(1.0), order, role);
}

TruncatedSeries TruncatedSeries::monomial(int power, Polynomial p, int order, EpsilonRole role) {
    require(power >= 0, "series monomial power must be nonnegative");
    if (power > order) return TruncatedSeries(order, role);
    std::vector<Polynomial> t(static_cast<std::size_t>(power) + 1);
    t.back() = std::move(p);
    return TruncatedSeries(std::move(t), order, role);
}

void TruncatedSeries::trim() {
    while (!terms_.empty() && terms_.back().is_zero()) terms_.pop_back();
}

void TruncatedSeries::check_compatible(const TruncatedSeries& other, const char* op) const {
    if (order_ != other.order_ || role_ != other.role_)
        throw Error(ErrorKind::ContractViolation,
                    std::string(op) + ": series differ in order or epsilon role (" + std::to_string(order_) + "/" +
                        to_string(role_) + " vs " + std::to_string(other.order_) + "/" + to_string(other.role_) + ")");
}

const Polynomial& TruncatedSeries::term(int k) const noexcept {
    if (k < 0 || static_cast<std::size_t>(k) >= terms_.size()) return kZero;
    return terms_[static_cast<std::size_t>(k)];
}

TruncatedSeries TruncatedSeries::truncated(int new_order) const {
    require(new_order >= 0 && new_order <= order_, "truncated: new order out of range");
    return TruncatedSeries(terms_, new_order, role_);
}

double TruncatedSeries::evaluate(double eps, double x) const noexcept {
    double acc = 0.0;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) acc = acc * eps + (*it)(x);
    return acc;
}

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& rhs) {
    check_compatible(rhs, "series add");
    if (rhs.terms_.size() > terms_.size()) terms_.resize(rhs.terms_.size());
    for (std::size_t k = 0; k < rhs.terms_.size(); ++k) terms_[k] += rhs.terms_[k];
    trim();
    return *this;
}

TruncatedSeries& TruncatedSeries::operator-=(const TruncatedSeries& rhs) {
    check_compatible(rhs, "series subtract");
    if (rhs.terms_.size() > terms_.size()) terms_.resize(rhs.terms_.size());
    for (std::size_t k = 0; k < rhs.terms_.size(); ++k) terms_[k] -= rhs.terms_[k];
    trim();
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double s) {
    for (auto& t : terms_) t *= s;
    trim();
    return *this;
}

TruncatedSeries operator*(const TruncatedSeries& a, const Polynomial& p) {
    std::vector<Polynomial> t;
    t.reserve(a.terms_.size());
    for (const auto& c : a.terms_) t.push_back(c * p);
    return TruncatedSeries(std::move(t), a.order_, a.role_);
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_compatible(b, "series multiply");
    if (a.terms_.empty() || b.terms_.empty()) return TruncatedSeries(a.order_, a.role_);
    const std::size_t len = std::min<std::size_t>(a.terms_.size() + b.terms_.size() - 1,
                                                  static_cast<std::size_t>(a.order_) + 1);
    std::vector<Polynomial> out(len);
    for (std::size_t i = 0; i < a.terms_.size() && i < len; ++i) {
        if (a.terms_[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.terms_.size() && i + j < len; ++j) out[i + j] += a.terms_[i] * b.terms_[j];
    }
    return TruncatedSeries(std::move(out), a.order_, a.role_);
}

TruncatedSeries TruncatedSeries::pow(int k) const {
    require(k >= 0, "series pow: negative exponent");
    TruncatedSeries result = one(order_, role_);
    TruncatedSeries base = *this;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) { return a * b; }

TruncatedSeries binomial_series(const TruncatedSeries& y, double a) {
    require(y.has_zero_constant_term(), "binomial_series: argument must vanish at eps = 0");
    TruncatedSeries result = TruncatedSeries::one(y.order(), y.role());
    TruncatedSeries power = TruncatedSeries::one(y.order(), y.role());
    double coeff = 1.0;
    // y^k starts at eps^k, so order() terms suffice.
    for (int k = 1; k <= y.order(); ++k) {
        coeff *= (a - (k - 1)) / k;
        power = power * y;
        if (power.terms().empty()) break;
        result += power * coeff;
    }
    return result;
}

TruncatedSeries taylor_shift(const Polynomial& p, const TruncatedSeries& eta) {
    require(eta.has_zero_constant_term(), "taylor_shift: shift must vanish at eps = 0");
    TruncatedSeries result = TruncatedSeries::constant(p, eta.order(), eta.role());
    TruncatedSeries power = TruncatedSeries::one(eta.order(), eta.role());
    Polynomial deriv = p;
    double inv_fact = 1.0;
    for (int k = 1; k <= std::min(p.degree(), eta.order()); ++k) {
        deriv = deriv.derivative();
        inv_fact /= k;
        power = power * eta;
        result += power * (deriv * inv_fact);
    }
    return result;
}

GaussianShift series_compose_gaussian_shift(const TruncatedSeries& eta, int s_max) {
    if (!eta.has_zero_constant_term())
        throw Error(ErrorKind::ContractViolation, "series_compose_gaussian_shift: eta has a nonzero constant term");
    require(s_max >= 1, "series_compose_gaussian_shift: s_max must be >= 1");

    const int order = eta.order();
    const auto role = eta.role();
    GaussianShift out{TruncatedSeries::one(order, role), TruncatedSeries(order, role)};
    TruncatedSeries power = TruncatedSeries::one(order, role);
    double inv_fact = 1.0;
    // eta^k is O(eps^k): terms with k > order vanish after truncation.
    for (int k = 1; k <= std::min(s_max, order); ++k) {
        power = power * eta;
        if (power.terms().empty()) break;
        inv_fact /= k;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        // phi(x+eta)/phi(x) = sum_k (-1)^k H_k eta^k / k!
        out.phi_series += power * (hermite(k) * (sign * inv_fact));
        // (Phi(x+eta) - Phi(x))/phi(x) = sum_k (-1)^(k-1) H_{k-1} eta^k / k!
        out.Phi_series += power * (hermite(k - 1) * (-sign * inv_fact));
    }
    return out;
}

}  // namespace nuedge::polyalg
