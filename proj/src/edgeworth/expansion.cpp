#include "nuedge/edgeworth/expansion.hpp"

#include <cmath>
#include <functional>

#include "nuedge/error.hpp"
#include "nuedge/polyalg/hermite.hpp"

namespace nuedge::edgeworth {

using polyalg::EpsilonRole;
using polyalg::hermite;

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

// Visits every tuple (k_1..k_j) of nonnegative integers with sum_l l k_l = j,
// in lexicographic order.
void for_each_tuple(int j, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> k(static_cast<std::size_t>(j), 0);
    std::function<void(int, int)> descend = [&](int l, int remaining) {
        if (l > j) {
            if (remaining == 0) visit(k);
            return;
        }
        for (int c = 0; c * l <= remaining; ++c) {
            k[static_cast<std::size_t>(l - 1)] = c;
            descend(l + 1, remaining - c * l);
        }
        k[static_cast<std::size_t>(l - 1)] = 0;
    };
    descend(1, j);
}

int hermite_index(const std::vector<int>& k) {
    int total = 0;
    for (std::size_t l = 0; l < k.size(); ++l) total += (static_cast<int>(l) + 3) * k[l];
    return total - 1;
}

// Phi(x+eta) + phi(x+eta) sum_j s^j P_j(x+eta) = Phi(x) + phi(x) * result,
// with s and eta given as series in a common small parameter.
TruncatedSeries recompose(const std::vector<Polynomial>& polys, const TruncatedSeries& sigma_inv,
                          const TruncatedSeries& eta) {
    const int order = eta.order();
    const auto shift = polyalg::series_compose_gaussian_shift(eta, std::max(order, 1));
    TruncatedSeries corrections(order, eta.role());
    TruncatedSeries power = TruncatedSeries::one(order, eta.role());
    for (const auto& p : polys) {
        power = power * sigma_inv;
        if (power.terms().empty()) break;
        if (!p.is_zero()) corrections += power * polyalg::taylor_shift(p, eta);
    }
    return shift.Phi_series + shift.phi_series * corrections;
}

void check_stationary(const StationaryCoefficients& coeffs, int r, int m) {
    require(m >= 3, "expansion target m must be >= 3");
    require(r >= 1 && r <= m - 2, "expansion order r must satisfy 1 <= r <= m-2");
    if (!(coeffs.p_at(2) > 0.0))
        throw Error(ErrorKind::DegenerateVariance, "asymptotic variance rate p_2 must be positive");
}

}  // namespace

double CumulantVector::operator()(int j) const {
    require(j >= 1, "cumulant index starts at 1");
    if (j > max_order()) return 0.0;
    return gamma[static_cast<std::size_t>(j - 1)];
}

CumulantVector CumulantVector::standardized() const {
    require(sigma_n > 0.0, "standardization needs sigma_n > 0");
    CumulantVector w{gamma, "W_n", sigma_n};
    double scale = 1.0;
    for (auto& g : w.gamma) {
        scale /= sigma_n;
        g *= scale;
    }
    return w;
}

std::vector<double> CumulantVector::reduced(int r) const {
    require(sigma_n > 0.0, "reduced cumulants need sigma_n > 0");
    require(r + 2 <= max_order(), "reduced cumulants: not enough cumulants for the requested order");
    std::vector<double> c(static_cast<std::size_t>(r));
    const bool standardized_subject = subject == "W_n";
    for (int j = 1; j <= r; ++j) {
        const double g = (*this)(j + 2);
        c[static_cast<std::size_t>(j - 1)] = standardized_subject ? g * std::pow(sigma_n, j) : g / (sigma_n * sigma_n);
    }
    return c;
}

Polynomial ExpansionPolynomials::classical(int j) const {
    require(j >= 1 && j <= order(), "classical: index out of range");
    return polys[static_cast<std::size_t>(j - 1)] * (-std::pow(scale, -j));
}

double StationaryCoefficients::p_at(int k) const {
    require(k >= 2, "p_k is defined for k >= 2");
    const auto i = static_cast<std::size_t>(k - 2);
    return i < p.size() ? p[i] : 0.0;
}

double StationaryCoefficients::q_at(int k) const {
    require(k >= 2, "q_k is defined for k >= 2");
    const auto i = static_cast<std::size_t>(k - 2);
    return i < q.size() ? q[i] : 0.0;
}

ExpansionPolynomials selfnorm_polynomials(const std::vector<double>& reduced, int r) {
    require(r >= 1, "selfnorm_polynomials: order must be >= 1");
    require(static_cast<int>(reduced.size()) >= r, "selfnorm_polynomials: missing reduced cumulants");
    ExpansionPolynomials out;
    for (int j = 1; j <= r; ++j) {
        Polynomial h;
        for_each_tuple(j, [&](const std::vector<int>& k) {
            double weight = 1.0;
            for (std::size_t l = 0; l < k.size(); ++l) {
                if (k[l] == 0) continue;
                const double c = reduced[l] / factorial(static_cast<int>(l) + 3);
                weight *= std::pow(c, k[l]) / factorial(k[l]);
            }
            if (weight != 0.0) h += hermite(hermite_index(k)) * weight;
        });
        out.polys.push_back(h * -1.0);
    }
    return out;
}

ExpansionPolynomials stationary_polynomials(const StationaryCoefficients& coeffs, int r, int m) {
    check_stationary(coeffs, r, m);
    const int order = m - 2;
    const auto role = EpsilonRole::InvSigma;
    const double p2 = coeffs.p_at(2), q2 = coeffs.q_at(2);

    // gamma_{l+2}(S_n) / sigma_n^2 = alpha_l s^2 + beta_l with s = 1/sigma_n.
    std::vector<TruncatedSeries> bracket;
    for (int l = 1; l <= order; ++l) {
        const double alpha = coeffs.q_at(l + 2) - q2 * coeffs.p_at(l + 2) / p2;
        const double beta = coeffs.p_at(l + 2) / p2;
        bracket.emplace_back(std::vector<Polynomial>{Polynomial{beta}, Polynomial{}, Polynomial{alpha}}, order, role);
        bracket.back() *= 1.0 / factorial(l + 2);
    }

    TruncatedSeries total(order, role);
    for (int j = 1; j <= order; ++j) {
        for_each_tuple(j, [&](const std::vector<int>& k) {
            TruncatedSeries term = TruncatedSeries::monomial(j, Polynomial{1.0}, order, role);
            double inv_fact = 1.0;
            for (std::size_t l = 0; l < k.size(); ++l) {
                if (k[l] == 0) continue;
                term = term * bracket[l].pow(k[l]);
                inv_fact /= factorial(k[l]);
            }
            total += term * (hermite(hermite_index(k)) * inv_fact);
        });
    }

    ExpansionPolynomials out;
    for (int j = 1; j <= r; ++j) out.polys.push_back(total.term(j) * -1.0);
    return out;
}

ExpansionPolynomials sqrtn_polynomials(const StationaryCoefficients& coeffs, int r, int m) {
    check_stationary(coeffs, r, m);
    const int order = m - 2;
    const auto role = EpsilonRole::InvSqrtN;
    const double p2 = coeffs.p_at(2), q2 = coeffs.q_at(2);
    const Polynomial x = Polynomial::monomial(1);

    const auto stationary = stationary_polynomials(coeffs, order, m);
    const auto eps = TruncatedSeries::monomial(1, Polynomial{1.0}, order, role);
    // sigma_n^2 = p_2 n + q_2, so sigma_n^{-1} = eps p_2^{-1/2} rho and rho = sqrt(p_2 n) / sigma_n.
    const auto y = TruncatedSeries::monomial(2, Polynomial{q2 / p2}, order, role);
    const auto rho = polyalg::binomial_series(y, -0.5);
    const auto sigma_inv = eps * rho * (1.0 / std::sqrt(p2));
    const auto eta = (rho - TruncatedSeries::one(order, role)) * x + sigma_inv * coeffs.c;

    const auto series = recompose(stationary.polys, sigma_inv, eta);
    ExpansionPolynomials out;
    out.scale = std::sqrt(p2);
    for (int j = 1; j <= r; ++j) out.polys.push_back(series.term(j) * std::pow(p2, 0.5 * j));
    return out;
}

ExpansionPolynomials affine_recompose(const ExpansionPolynomials& polys, const TruncatedSeries& u_series,
                                      const TruncatedSeries& v_series, int m) {
    require(m >= 3, "affine_recompose: m must be >= 3");
    const int order = m - 2;
    if (!u_series.has_zero_constant_term() || !v_series.has_zero_constant_term())
        throw Error(ErrorKind::ContractViolation, "affine_recompose: u and v series must vanish at eps = 0");
    require(u_series.order() >= order && v_series.order() >= order,
            "affine_recompose: u and v series must be carried to order m-2");
    require(u_series.role() == v_series.role(), "affine_recompose: u and v use different small parameters");

    const auto u = u_series.truncated(order);
    const auto v = v_series.truncated(order);
    const auto one = TruncatedSeries::one(order, u.role());
    const auto sigma_inv = TruncatedSeries::monomial(1, Polynomial{1.0}, order, u.role()) * (one + u);
    const auto eta = u * Polynomial::monomial(1) + v;

    const auto series = recompose(polys.polys, sigma_inv, eta);
    ExpansionPolynomials out;
    out.normalization = polys.normalization;
    for (int j = 1; j <= order; ++j) out.polys.push_back(series.term(j));
    return out;
}

double evaluate_expansion(const ExpansionPolynomials& polys, int r, double x) {
    require(r >= 0 && r <= polys.order(), "evaluate_expansion: order exceeds available polynomials");
    const double b_inv = 1.0 / polys.normalization.B_n;
    double corr = 0.0;
    for (int j = r; j >= 1; --j) corr = corr * b_inv + polys.polys[static_cast<std::size_t>(j - 1)](x);
    corr *= b_inv;
    if (corr == 0.0) return polyalg::normal_cdf(x);
    return polyalg::normal_cdf(x) + polyalg::normal_pdf(x) * corr;
}

TailEnvelope expansion_tail(const ExpansionPolynomials& polys, int r) {
    require(r >= 0 && r <= polys.order(), "expansion_tail: order exceeds available polynomials");
    TailEnvelope env{1.0, 0};
    double b_pow = 1.0;
    for (int j = 1; j <= r; ++j) {
        b_pow /= polys.normalization.B_n;
        const auto& p = polys.polys[static_cast<std::size_t>(j - 1)];
        for (double c : p.coeffs()) env.amplitude += b_pow * std::abs(c);
        env.degree = std::max(env.degree, p.degree());
    }
    return env;
}

}  // namespace nuedge::edgeworth
