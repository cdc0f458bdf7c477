#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "nuedge/dist/curve.hpp"
#include "nuedge/dist/functionals.hpp"
#include "nuedge/dist/inversion.hpp"
#include "nuedge/edgeworth/expansion.hpp"
#include "nuedge/error.hpp"
#include "nuedge/markov/analysis.hpp"
#include "nuedge/markov/chain.hpp"
#include "nuedge/polyalg/hermite.hpp"

using namespace nuedge;
using namespace nuedge::dist;
using polyalg::normal_cdf;

namespace {

bool kind_is(const Error& e, ErrorKind k) { return e.kind() == k; }

auto is_kind(ErrorKind k) {
    return Catch::Matchers::Predicate<Error>([k](const Error& e) { return kind_is(e, k); });
}

CdfCurve fair_coin_two_steps() { return CdfCurve::atoms({{-2.0, 0.25}, {0.0, 0.5}, {2.0, 0.25}}); }

struct Mixture {
    std::vector<double> w, m, s;
};

Mixture random_mixture(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Mixture mix;
    const int k = 1 + static_cast<int>(u(rng) * 3.0);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        mix.w.push_back(0.2 + u(rng));
        mix.m.push_back(-2.0 + 4.0 * u(rng));
        mix.s.push_back(0.4 + 1.1 * u(rng));
        total += mix.w.back();
    }
    for (double& w : mix.w) w /= total;
    return mix;
}

CdfCurve mixture_curve(const Mixture& mix) {
    double reach = 0.0, smax = 0.0;
    for (std::size_t i = 0; i < mix.w.size(); ++i) {
        reach = std::max(reach, std::abs(mix.m[i]) + mix.s[i]);
        smax = std::max(smax, mix.s[i]);
    }
    return CdfCurve::analytic(
        [mix](double x) {
            double d = 0.0;
            for (std::size_t i = 0; i < mix.w.size(); ++i) {
                const double z = (x - mix.m[i]) / mix.s[i];
                d += mix.w[i] * (x < 0.0 ? normal_cdf(z) : -normal_cdf(-z));
            }
            return d;
        },
        TailModel{1.0, 0, smax, reach}, true, "mixture");
}

}  // namespace

TEST_CASE("curve evaluation") {
    const auto c = fair_coin_two_steps();
    REQUIRE(c(-2.5) == 0.0);
    REQUIRE(c(-2.0) == 0.25);
    REQUIRE(c.left_limit(-2.0) == 0.0);
    REQUIRE(c(0.0) == 0.75);
    REQUIRE(c.left_limit(0.0) == 0.25);
    REQUIRE(c(1.9) == 0.75);
    REQUIRE(c(2.0) == 1.0);
    REQUIRE(c.left_limit(2.0) == 0.75);

    const auto e = CdfCurve::empirical({1.0, 0.0, 1.0, 0.0});
    REQUIRE(e(-0.1) == 0.0);
    REQUIRE(e(0.0) == 0.5);
    REQUIRE(e(0.5) == 0.5);
    REQUIRE(e(1.0) == 1.0);
    const auto single = CdfCurve::empirical({3.0});
    REQUIRE(single.left_limit(3.0) == 0.0);
    REQUIRE(single(3.0) == 1.0);

    const auto phi = CdfCurve::normal();
    REQUIRE(phi(0.3) == Catch::Approx(normal_cdf(0.3)).epsilon(1e-15));
    REQUIRE(phi.deviation(12.0) == -normal_cdf(-12.0));

    REQUIRE_THROWS_MATCHES(CdfCurve::atoms({{0.0, 0.5}, {1.0, 0.4}}), Error, is_kind(ErrorKind::ContractViolation));
    REQUIRE_THROWS_AS(CdfCurve::grid({0.0, 1.0}, {0.6, 0.5}, std::nullopt), Error);
    REQUIRE_NOTHROW(CdfCurve::grid({0.0, 1.0}, {0.6, 0.5}, std::nullopt, false));
}

TEST_CASE("curve text round trip") {
    const auto grid = CdfCurve::grid({-1.0, 0.0, 1.0}, {0.1, 0.5, 0.9}, TailModel{2.5, 3, 1.0, 0.5});
    const auto back = parse_curve(serialize_curve(grid));
    REQUIRE(back.nodes() == grid.nodes());
    REQUIRE(back.values() == grid.values());
    REQUIRE(back.tail() == grid.tail());
    REQUIRE(serialize_curve(back) == serialize_curve(grid));

    const auto atoms = fair_coin_two_steps();
    const auto a2 = parse_curve(serialize_curve(atoms));
    REQUIRE(a2.kind() == CurveKind::Atoms);
    REQUIRE(serialize_curve(a2) == serialize_curve(atoms));

    const auto sampled = parse_curve(serialize_curve(CdfCurve::normal(), 6.0, 101));
    REQUIRE(sampled.kind() == CurveKind::Grid);
    REQUIRE(sampled(0.0) == Catch::Approx(0.5));
    REQUIRE_THROWS_MATCHES(parse_curve("# cdf nonsense\n"), Error, is_kind(ErrorKind::ParseError));
}

TEST_CASE("characteristic function inversion") {
    SECTION("standard normal") {
        const CharFn psi = [](double t) { return std::complex<double>(std::exp(-0.5 * t * t), 0.0); };
        const auto grid = uniform_grid(6.0, 601);
        const auto res = invert_cf(psi, grid, InversionOptions{.tolerance = 1e-8});
        double worst = 0.0;
        for (double x : grid) worst = std::max(worst, std::abs(res.curve(x) - normal_cdf(x)));
        REQUIRE(worst <= 1e-8);
        REQUIRE(res.error_estimate <= 1e-8);
    }
    SECTION("point mass") {
        const CharFn psi = [](double) { return std::complex<double>(1.0, 0.0); };
        const auto grid = uniform_grid(2.0, 401);
        const auto res = invert_cf(psi, grid, InversionOptions{.tolerance = 1.0});
        REQUIRE(res.T == 400.0);
        REQUIRE(std::abs(res.curve(0.0) - 0.5) <= 1e-9);
        for (double x : grid) {
            if (std::abs(x) < 0.1) continue;
            REQUIRE(std::abs(res.curve(x) - (x > 0.0 ? 1.0 : 0.0)) <= 1e-6);
        }
        REQUIRE_THROWS_MATCHES(invert_cf(psi, grid), Error, is_kind(ErrorKind::AccuracyError));
    }
    SECTION("two fair coin flips") {
        const CharFn psi = [](double t) { return std::complex<double>(std::cos(t) * std::cos(t), 0.0); };
        const auto lattice = fair_coin_two_steps();
        const std::vector<double> grid{-3.0, -1.0, 1.0, 3.0};
        const auto res = invert_cf(psi, grid, InversionOptions{.tolerance = 1.0, .genuine = false});
        for (double x : grid) REQUIRE(std::abs(res.curve(x) - lattice(x)) <= 1e-6);
    }
    SECTION("lattice chain at continuity points within the reported error") {
        const auto spec = markov::builtin_chain("two-state-markov-pm1(0.3)");
        const markov::CharacteristicFunction cf(spec, 6);
        const auto law = markov::lattice_distribution(spec, 6);
        std::vector<Atom> atoms;
        for (const auto& a : law.atoms) atoms.push_back({a.value, a.prob});
        const auto exact = CdfCurve::atoms(atoms);
        std::vector<double> grid;
        for (int k = -7; k <= 7; k += 2) grid.push_back(static_cast<double>(k));
        const auto res = invert_cf([&cf](double t) { return cf(t); }, grid, InversionOptions{.tolerance = 1.0});
        for (std::size_t i = 0; i < grid.size(); ++i)
            REQUIRE(std::abs(res.curve(grid[i]) - exact(grid[i])) <= res.node_errors[i] + 1e-9);
    }
    SECTION("isotonic projection") {
        std::vector<double> v{0.0, 0.3, 0.2, 0.5, 0.4, 0.4, 1.0};
        const double change = isotonic_projection(v);
        const std::vector<double> expect{0.0, 0.25, 0.25, 1.3 / 3, 1.3 / 3, 1.3 / 3, 1.0};
        for (std::size_t i = 0; i < v.size(); ++i) REQUIRE(v[i] == Catch::Approx(expect[i]).epsilon(1e-15));
        REQUIRE(change == Catch::Approx(0.0666666666666667));
    }
}

TEST_CASE("kolmogorov and weighted sup") {
    const auto phi = CdfCurve::normal();
    REQUIRE(kolmogorov(phi, phi) <= 1e-290);
    REQUIRE(kolmogorov(phi, CdfCurve::normal(1.0)) == Catch::Approx(2.0 * normal_cdf(0.5) - 1.0).epsilon(1e-12));

    const auto lattice = fair_coin_two_steps();
    const auto g = CdfCurve::normal(0.0, std::numbers::sqrt2);
    double oracle = 0.0;
    const double left[3] = {0.0, 0.25, 0.75}, right[3] = {0.25, 0.75, 1.0}, at[3] = {-2.0, 0.0, 2.0};
    for (int k = 0; k < 3; ++k) {
        const double gv = normal_cdf(at[k] / std::numbers::sqrt2);
        oracle = std::max({oracle, std::abs(left[k] - gv), std::abs(right[k] - gv)});
    }
    REQUIRE(kolmogorov(lattice, g) == Catch::Approx(oracle).epsilon(1e-15));

    for (const auto& [F, G] : {std::pair{phi, CdfCurve::normal(0.3, 1.2)}, std::pair{lattice, g}})
        REQUIRE(weighted_sup(F, G, 0.0) == kolmogorov(F, G));
    REQUIRE(weighted_sup(phi, phi, 3.0) <= 1e-290);

    const auto shifted = CdfCurve::normal(1e-3);
    const auto rep = weighted_sup_report(phi, shifted, 3.0);
    const double x = rep.argmax;
    REQUIRE(rep.value >= std::pow(1.0 + std::abs(x), 3) * std::abs(normal_cdf(x) - normal_cdf(x - 1e-3)) * (1 - 1e-12));
    REQUIRE(rep.regime == SupRegime::Grid);
    const double refined = weighted_sup(phi, shifted, 3.0, GridOptions{.nodes = 81920});
    REQUIRE(std::abs(refined - rep.value) <= 0.01 * rep.value);

    const auto bare = CdfCurve::grid({-1.0, 1.0}, {0.0, 1.0}, std::nullopt);
    REQUIRE_THROWS_MATCHES(weighted_sup(bare, phi, 1.0), Error, is_kind(ErrorKind::ContractViolation));
    REQUIRE_NOTHROW(kolmogorov(bare, phi));

    const auto restricted = weighted_sup_report(phi, CdfCurve::normal(0.5), 3.0, GridOptions{.window = 2.0});
    REQUIRE(std::abs(restricted.argmax) <= 2.0);
}

TEST_CASE("lp and transport functionals") {
    const auto phi = CdfCurve::normal();
    REQUIRE(lp_distance(phi, phi, 1.0) <= 1e-290);
    for (double c : {0.1, 1.0, 2.5})
        REQUIRE(lp_distance(phi, CdfCurve::normal(c), 1.0) == Catch::Approx(c).epsilon(1e-10));

    // Brute force trapezoid with 10^6 nodes on [-40, 40].
    double brute = 0.0;
    const int N = 1000000;
    const double h = 80.0 / N;
    for (int i = 0; i <= N; ++i) {
        const double x = -40.0 + h * i;
        const double d = normal_cdf(x) - normal_cdf(x - 0.1);
        brute += (i == 0 || i == N ? 0.5 : 1.0) * d * d * h;
    }
    REQUIRE(std::abs(lp_distance(phi, CdfCurve::normal(0.1), 2.0) - std::sqrt(brute)) <= 1e-6);

    REQUIRE(wp_upper(phi, phi, 2.0) <= 1e-140);
    const auto other = CdfCurve::normal(0.7, 1.3);
    REQUIRE(wp_upper(phi, other, 1.0) == lp_distance(phi, other, 1.0));
    REQUIRE(wp_upper(phi, CdfCurve::normal(0.4), 2.0) >= wp_exact(phi, CdfCurve::normal(0.4), 2.0));
    const auto short_mass = CdfCurve::grid({-1.0, 1.0}, {0.0, 0.9}, TailModel{});
    REQUIRE_THROWS_MATCHES(wp_upper(short_mass, phi, 1.0), Error, is_kind(ErrorKind::ContractViolation));

    REQUIRE(wp_exact(phi, phi, 2.0) == 0.0);
    for (double p : {1.0, 2.0, 3.0}) REQUIRE(wp_exact(phi, CdfCurve::normal(0.6), p) == Catch::Approx(0.6).epsilon(1e-8));
    REQUIRE(wp_exact(phi, CdfCurve::normal(0.0, 1.5), 2.0) == Catch::Approx(0.5).epsilon(1e-8));

    edgeworth::ExpansionPolynomials psi1 = edgeworth::selfnorm_polynomials({0.4}, 1);
    psi1.normalization.B_n = 3.0;
    REQUIRE_THROWS_MATCHES(wp_exact(phi, CdfCurve::expansion(psi1, 1), 1.0), Error,
                           is_kind(ErrorKind::ContractViolation));
    REQUIRE_NOTHROW(wp_upper(phi, CdfCurve::expansion(psi1, 1), 2.0));

    // Atoms: W_1 between two point masses is their distance.
    const auto a = CdfCurve::atoms({{0.0, 1.0}});
    const auto b = CdfCurve::atoms({{0.25, 0.5}, {1.25, 0.5}});
    REQUIRE(wp_exact(a, b, 1.0) == Catch::Approx(0.75));
    REQUIRE(wp_exact(a, b, 2.0) == Catch::Approx(std::sqrt(0.5 * 0.0625 + 0.5 * 1.5625)));
    REQUIRE(lp_distance(a, b, 1.0) == Catch::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("transport invariants on random Gaussian mixtures") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto F = mixture_curve(random_mixture(rng));
        const auto G = mixture_curve(random_mixture(rng));
        const double w1 = wp_exact(F, G, 1.0);
        REQUIRE(std::abs(w1 - lp_distance(F, G, 1.0)) <= 1e-8);
        for (double p : {2.0, 3.0}) REQUIRE(wp_exact(F, G, p) <= wp_upper(F, G, p));
    }
}

TEST_CASE("moment gap") {
    const auto phi = CdfCurve::normal();
    const auto sq = [](double x) { return 2.0 * x; };
    const auto cube = [](double x) { return 3.0 * x * x; };
    REQUIRE(moment_gap(cube, phi, phi) == 0.0);

    const auto spec = markov::builtin_chain("two-state-markov-pm1(0.3)");
    const std::size_t n = 20;
    const auto law = markov::lattice_distribution(spec, n);
    const auto g = markov::exact_cumulants(spec, n, 3);
    const double sigma = std::sqrt(g(2));
    std::vector<Atom> atoms;
    double m2 = 0.0, m3 = 0.0;
    for (const auto& a : law.atoms) {
        const double w = a.value / sigma;
        atoms.push_back({w, a.prob});
        m2 += a.prob * w * w;
        m3 += a.prob * w * w * w;
    }
    const auto F = CdfCurve::atoms(atoms);
    auto polys = edgeworth::selfnorm_polynomials(g.reduced(1), 1);
    polys.normalization = {0.0, sigma, sigma};
    const auto psi = CdfCurve::expansion(polys, 1);
    const double gamma3 = g(3) / std::pow(sigma, 3);

    REQUIRE(std::abs(m2 - 1.0) <= 1e-9);
    REQUIRE(moment_gap(sq, F, psi) <= 1e-9);
    REQUIRE(std::abs(expectation_difference(cube, F, psi) - (m3 - gamma3)) <= 1e-9);
    REQUIRE(moment_gap(cube, F, psi) <= 1e-8);
    REQUIRE(std::abs(expectation_difference(cube, F, phi) - m3) <= 1e-9);

    const auto wild = [](double x) { return std::exp(x * x); };
    REQUIRE_THROWS_MATCHES(moment_gap(wild, phi, CdfCurve::normal(0.1)), Error, is_kind(ErrorKind::AccuracyError));
}
