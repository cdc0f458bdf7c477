#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nuedge/edgeworth/expansion.hpp"
#include "nuedge/error.hpp"
#include "nuedge/polyalg/hermite.hpp"

using namespace nuedge;
using namespace nuedge::edgeworth;
using polyalg::EpsilonRole;
using polyalg::hermite;
using polyalg::normal_cdf;
using polyalg::normal_pdf;
using Catch::Approx;

namespace {

double max_diff(const Polynomial& a, const Polynomial& b) { return max_coeff_diff(a, b); }

// Distribution-function correction whose Fourier-Stieltjes transform is
// poly(it) exp(-t^2/2), by direct numerical integration of the inversion formula.
double fourier_cdf_correction(const std::vector<double>& it_coeffs, double x) {
    const double T = 40.0;
    const int N = 40000;
    const double h = T / N;
    double acc = 0.0;
    for (int i = 1; i <= N; ++i) {
        const double t = i * h;
        std::complex<double> poly = 0.0, itp = 1.0;
        for (double c : it_coeffs) {
            poly += c * itp;
            itp *= std::complex<double>(0.0, t);
        }
        const auto val = std::exp(std::complex<double>(0.0, -t * x)) * poly * std::exp(-0.5 * t * t);
        acc += (i == N ? 0.5 : 1.0) * val.imag() / t;
    }
    // The integrand vanishes at t = 0 because poly(0) = 0 for these corrections.
    return -acc * h / std::numbers::pi;
}

double sup_on_grid(const std::function<double(double)>& f, double lo = -8.0, double hi = 8.0, int n = 1601) {
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(f(lo + (hi - lo) * i / (n - 1))));
    return worst;
}

}  // namespace

TEST_CASE("self-normalized polynomials reproduce classical terms") {
    const double g = 0.37, a = -0.8, b = 1.3;
    const auto one = selfnorm_polynomials({g, 0.0}, 1);
    REQUIRE(max_diff(one.classical(1), hermite(2) * (g / 6.0)) <= 1e-12);

    const auto two = selfnorm_polynomials({a, b}, 2);
    REQUIRE(max_diff(two.classical(1), hermite(2) * (a / 6.0)) <= 1e-12);
    REQUIRE(max_diff(two.classical(2), hermite(3) * (b / 24.0) + hermite(5) * (a * a / 72.0)) <= 1e-12);

    const auto zero = selfnorm_polynomials({0.0, 0.0, 0.0}, 3);
    for (int j = 1; j <= 3; ++j) REQUIRE(zero.polys[j - 1].is_zero());

    REQUIRE_THROWS_AS(selfnorm_polynomials({1.0}, 2), Error);
    REQUIRE_THROWS_AS(selfnorm_polynomials({1.0}, 0), Error);
}

TEST_CASE("second-order term agrees with Fourier inversion of the formal expansion") {
    const double a = 0.6, b = -0.45;
    const auto polys = selfnorm_polynomials({a, b}, 2);
    // eps^2 coefficient of exp(a (it)^3 eps / 6 + b (it)^4 eps^2 / 24): b/24 (it)^4 + a^2/72 (it)^6.
    const std::vector<double> coeffs{0, 0, 0, 0, b / 24.0, 0, a * a / 72.0};
    for (double x : {-3.0, -1.2, 0.0, 0.4, 2.5}) {
        const double oracle = fourier_cdf_correction(coeffs, x);
        REQUIRE(std::abs(normal_pdf(x) * polys.polys[1](x) - oracle) <= 1e-8);
    }
}

TEST_CASE("tuple enumeration covers every partition") {
    const std::vector<double> c(6, 1.0);
    const auto polys = selfnorm_polynomials(c, 6);
    // (6,0,...,0) is the only tuple in A_6 reaching H_17, with weight (1/3!)^6 / 6!.
    REQUIRE(polys.classical(6).degree() == 17);
    REQUIRE(polys.classical(6).coeff(17) == Approx(1.0 / (std::pow(6.0, 6) * 720.0)));
    for (int j = 1; j <= 6; ++j) REQUIRE(polys.classical(j).degree() <= 3 * j + 2);
}

TEST_CASE("stationary polynomials") {
    SECTION("alpha = 0 reduces to self-normalized with c = beta") {
        StationaryCoefficients sc;
        sc.p = {2.0, 0.4, -0.3, 0.2};
        sc.q = {0.0, 0.0, 0.0, 0.0};
        const auto st = stationary_polynomials(sc, 3, 5);
        const auto sn = selfnorm_polynomials({0.2, -0.15, 0.1}, 3);
        for (int j = 1; j <= 3; ++j) REQUIRE(max_diff(st.polys[j - 1], sn.polys[j - 1]) <= 1e-14);
    }
    SECTION("gamma_3 carried by sigma^-2 lands at order 3") {
        StationaryCoefficients sc;
        sc.p = {1.0, 0.0, 0.0};
        sc.q = {0.0, 0.7, 0.0};
        const auto st = stationary_polynomials(sc, 3, 5);
        REQUIRE(st.polys[0].is_zero());
        REQUIRE(st.polys[1].is_zero());
        REQUIRE(max_diff(st.classical(3), hermite(2) * (0.7 / 6.0)) <= 1e-14);
    }
    SECTION("beta only at first order") {
        StationaryCoefficients sc;
        sc.p = {1.0, 0.9, 0.0};
        sc.q = {0.0, 0.0, 0.0};
        const auto st = stationary_polynomials(sc, 1, 3);
        REQUIRE(max_diff(st.classical(1), hermite(2) * (0.9 / 6.0)) <= 1e-14);
    }
    SECTION("degenerate variance") {
        StationaryCoefficients sc;
        sc.p = {0.0};
        REQUIRE_THROWS_MATCHES(stationary_polynomials(sc, 1, 3), Error,
                               Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::DegenerateVariance; }));
    }
    SECTION("agreement with per-n expansion improves like sigma^-(m-1)") {
        StationaryCoefficients sc;
        sc.p = {1.3, 0.5, -0.4, 0.3};
        sc.q = {0.6, -0.2, 0.35, 0.1};
        for (int m : {3, 4, 5}) {
            auto st = stationary_polynomials(sc, m - 2, m);
            std::vector<double> errs;
            for (int n : {256, 1024, 4096}) {
                const double s2 = n * sc.p_at(2) + sc.q_at(2);
                std::vector<double> red;
                for (int j = 1; j <= m - 2; ++j) red.push_back((n * sc.p_at(j + 2) + sc.q_at(j + 2)) / s2);
                auto sn = selfnorm_polynomials(red, m - 2);
                sn.normalization.B_n = st.normalization.B_n = std::sqrt(s2);
                errs.push_back(sup_on_grid([&](double x) {
                    return evaluate_expansion(sn, m - 2, x) - evaluate_expansion(st, m - 2, x);
                }));
            }
            // Each 4x step in n is a 2x step in sigma_n.
            for (std::size_t i = 1; i < errs.size(); ++i)
                REQUIRE(errs[i] <= errs[i - 1] * std::pow(2.0, -(m - 1)) * 1.3);
        }
    }
}

TEST_CASE("sqrt-n polynomials") {
    SECTION("gaussian case") {
        StationaryCoefficients sc;
        sc.p = {1.7, 0.0, 0.0};
        sc.q = {0.0, 0.0, 0.0};
        const auto bar = sqrtn_polynomials(sc, 2, 4);
        for (const auto& p : bar.polys) REQUIRE(p.is_zero());
    }
    SECTION("unit p2 first order") {
        StationaryCoefficients sc;
        sc.p = {1.0, 0.45, 0.0};
        sc.q = {0.0, 0.0, 0.0};
        const auto bar = sqrtn_polynomials(sc, 1, 3);
        REQUIRE(max_diff(bar.classical(1), hermite(2) * (0.45 / 6.0)) <= 1e-14);
    }
    SECTION("pure centering shift") {
        StationaryCoefficients sc;
        sc.p = {2.0};
        sc.q = {0.0};
        sc.c = 0.8;
        const auto bar = sqrtn_polynomials(sc, 2, 4);
        REQUIRE(max_diff(bar.classical(1), Polynomial{-0.8 / std::sqrt(2.0)}) <= 1e-14);
        REQUIRE(bar.classical(2).degree() == 1);
    }
    SECTION("residual against the shifted per-n expansion decays like n^-(m-1)/2") {
        StationaryCoefficients sc;
        sc.p = {1.4, 0.5, -0.4, 0.3};
        sc.q = {0.5, -0.2, 0.35, 0.1};
        sc.c = 0.3;
        for (int m : {3, 4, 5}) {
            const auto st = stationary_polynomials(sc, m - 2, m);
            const auto bar = sqrtn_polynomials(sc, m - 2, m);
            std::vector<double> errs;
            for (int n : {256, 1024, 4096}) {
                const double sigma = std::sqrt(n * sc.p_at(2) + sc.q_at(2));
                const double rho = std::sqrt(sc.p_at(2) * n) / sigma;
                auto st_n = st;
                st_n.normalization.B_n = sigma;
                auto bar_n = bar;
                bar_n.normalization.B_n = std::sqrt(sc.p_at(2) * n);
                errs.push_back(sup_on_grid([&](double x) {
                    return evaluate_expansion(st_n, m - 2, rho * x + sc.c / sigma) - evaluate_expansion(bar_n, m - 2, x);
                }));
            }
            for (std::size_t i = 1; i < errs.size(); ++i)
                REQUIRE(errs[i] <= errs[i - 1] * std::pow(2.0, -(m - 1)) * 1.3);
        }
    }
}

TEST_CASE("affine recomposition") {
    const auto role = EpsilonRole::InvB;
    SECTION("identity renormalization") {
        const auto in = selfnorm_polynomials({0.3, -0.2}, 2);
        const auto out = affine_recompose(in, TruncatedSeries(2, role), TruncatedSeries(2, role), 4);
        for (int j = 1; j <= 2; ++j) REQUIRE(max_diff(out.polys[j - 1], in.polys[j - 1]) <= 1e-15);
    }
    SECTION("pure shift of the normal law") {
        ExpansionPolynomials in;
        const double c = 0.9;
        const auto out = affine_recompose(in, TruncatedSeries(2, role),
                                          TruncatedSeries::monomial(1, Polynomial{c}, 2, role), 4);
        REQUIRE(max_diff(out.polys[0], Polynomial{c}) <= 1e-15);
        REQUIRE(max_diff(out.polys[1], Polynomial({0.0, -c * c / 2.0})) <= 1e-15);
    }
    SECTION("residual envelope") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> unif(-0.5, 0.5);
        const int m = 4;
        const auto in = selfnorm_polynomials({unif(rng), unif(rng)}, 2);
        const double u1 = unif(rng), u2 = unif(rng), v1 = unif(rng), v2 = unif(rng);
        const TruncatedSeries u({Polynomial{}, Polynomial{u1}, Polynomial{u2}}, 2, role);
        const TruncatedSeries v({Polynomial{}, Polynomial{v1}, Polynomial{v2}}, 2, role);
        auto out = affine_recompose(in, u, v, m);
        std::vector<double> scaled;
        for (double B : {10.0, 100.0, 1000.0}) {
            const double a = 1.0 + u1 / B + u2 / (B * B);
            const double vn = v1 / B + v2 / (B * B);
            auto direct = in;
            direct.normalization.B_n = B / a;  // the input expands in sigma_n^{-1} = a_n / B_n
            out.normalization.B_n = B;
            double worst = 0.0;
            for (int i = 0; i <= 1200; ++i) {
                const double x = -6.0 + i * 0.01;
                const double res = evaluate_expansion(direct, 2, a * x + vn) - evaluate_expansion(out, 2, x);
                worst = std::max(worst, std::abs(res) / (std::exp(-x * x / 4.0) * (1.0 + std::pow(std::abs(x), 8))));
            }
            scaled.push_back(worst * std::pow(B, m - 1));
        }
        REQUIRE(scaled[2] <= 2.0 * scaled[0]);
        REQUIRE(scaled[1] <= 2.0 * scaled[0]);
    }
    SECTION("constant terms rejected") {
        ExpansionPolynomials in;
        REQUIRE_THROWS_AS(affine_recompose(in, TruncatedSeries::one(2, role), TruncatedSeries(2, role), 4), Error);
    }
}

TEST_CASE("expansion evaluation") {
    ExpansionPolynomials e;
    REQUIRE(evaluate_expansion(e, 0, 0.0) == 0.5);
    e.polys = {hermite(2) * (-0.3 / 6.0)};
    REQUIRE(evaluate_expansion(e, 1, 0.0) == Approx(0.5 + 0.05 * normal_pdf(0.0)).epsilon(1e-15));
    REQUIRE(evaluate_expansion(e, 1, 0.0) == Approx(0.5199471140200716).epsilon(1e-12));
    const auto big = selfnorm_polynomials({2.0, -3.0, 1.0}, 3);
    REQUIRE(std::abs(evaluate_expansion(big, 3, 40.0) - 1.0) <= 1e-12);
    REQUIRE(std::abs(evaluate_expansion(big, 3, -40.0)) <= 1e-12);
}

TEST_CASE("tail envelope bounds the expansion") {
    auto e = selfnorm_polynomials({0.8, -0.5}, 2);
    e.normalization.B_n = 3.0;
    const auto env = expansion_tail(e, 2);
    for (double x = 1.0; x < 12.0; x += 0.25) {
        REQUIRE(std::abs(evaluate_expansion(e, 2, x) - 1.0) <= env.amplitude * (1 + std::pow(x, env.degree)) * normal_pdf(x));
        REQUIRE(std::abs(evaluate_expansion(e, 2, -x)) <= env.amplitude * (1 + std::pow(x, env.degree)) * normal_pdf(x));
    }
}

TEST_CASE("cumulant vector conversions") {
    CumulantVector s{{0.0, 4.0, 3.0, -2.0}, "S_n", 2.0};
    const auto w = s.standardized();
    REQUIRE(w(2) == Approx(1.0));
    REQUIRE(w(3) == Approx(3.0 / 8.0));
    REQUIRE(w(4) == Approx(-2.0 / 16.0));
    const auto r1 = s.reduced(2), r2 = w.reduced(2);
    REQUIRE(r1[0] == Approx(0.75));
    REQUIRE(r1[1] == Approx(-0.5));
    REQUIRE(r2[0] == Approx(r1[0]));
    REQUIRE(r2[1] == Approx(r1[1]));
}
