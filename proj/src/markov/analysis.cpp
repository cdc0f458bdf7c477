#include "nuedge/markov/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

#include "nuedge/error.hpp"

namespace nuedge::markov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr long double kTwoPiL = 2.0L * std::numbers::pi_v<long double>;

using LComplex = std::complex<long double>;
using LCMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;
using LCVector = Eigen::Matrix<LComplex, Eigen::Dynamic, 1>;

LCMatrix tilted_matrix_ld(const Matrix& kernel, const Matrix& observable, LComplex z) {
    LCMatrix m(kernel.rows(), kernel.cols());
    for (Eigen::Index i = 0; i < kernel.rows(); ++i)
        for (Eigen::Index j = 0; j < kernel.cols(); ++j)
            m(i, j) = kernel(i, j) == 0.0 ? LComplex(0.0L)
                                          : static_cast<long double>(kernel(i, j)) *
                                                std::exp(z * static_cast<long double>(observable(i, j)));
    return m;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

void check_horizon(const FiniteChainSpec& spec, std::size_t n, std::size_t max_n = kDefaultMaxSteps) {
    require(n <= max_n, "horizon " + std::to_string(n) + " exceeds the configured maximum " + std::to_string(max_n));
    require(n <= spec.max_steps(), "horizon exceeds the explicit kernel list");
}

// Running Var(S) and u(z) = E[S 1{X = z}] for the centered partial sum S.
struct VarianceTracker {
    Vector u;
    double var = 0.0;

    explicit VarianceTracker(Eigen::Index states) : u(Vector::Zero(states)) {}

    // Adds step with kernel p, centered observable g, and current marginal nu.
    void add(const Vector& nu, const Matrix& p, const Matrix& g) {
        const Matrix pg = p.cwiseProduct(g);
        const double step_var = nu.dot(p.cwiseProduct(g.cwiseProduct(g)).rowwise().sum());
        const double cov = u.dot(pg.rowwise().sum());
        var += step_var + 2.0 * cov;
        u = (u.transpose() * p + nu.transpose() * pg).transpose();
    }

    void reset(Eigen::Index states) {
        u = Vector::Zero(states);
        var = 0.0;
    }
};

double step_variance(const Vector& nu, const Matrix& p, const Matrix& g) {
    return nu.dot(p.cwiseProduct(g.cwiseProduct(g)).rowwise().sum());
}

CMatrix matrix_power(CMatrix base, std::size_t e) {
    CMatrix result = CMatrix::Identity(base.rows(), base.cols());
    while (e > 0) {
        if (e & 1U) result = result * base;
        e >>= 1U;
        if (e > 0) base = base * base;
    }
    return result;
}

double gcd_float(double a, double b, double tol) {
    a = std::abs(a);
    b = std::abs(b);
    if (a < b) std::swap(a, b);
    while (b > tol) {
        const double r = std::fmod(a, b);
        a = b;
        b = r;
    }
    return a;
}

}  // namespace

EllipticityReport check_ellipticity(const FiniteChainSpec& spec, double eps0) {
    require(eps0 > 0.0 && eps0 < 1.0, "check_ellipticity: eps0 must lie in (0,1)");
    const std::size_t stored = spec.stored_steps();
    const std::size_t one_step = spec.rule() == StepRule::Homogeneous ? 1 : stored;
    const std::size_t two_step = spec.rule() == StepRule::Explicit ? (stored > 0 ? stored - 1 : 0) : one_step;

    EllipticityReport rep;
    rep.max_density = 0.0;
    rep.min_two_step_density = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j <= one_step; ++j) {
        const Matrix& p = spec.kernel(j);
        rep.max_density = std::max(rep.max_density, static_cast<double>(p.cols()) * p.maxCoeff());
    }
    for (std::size_t j = 1; j <= two_step; ++j) {
        const Matrix two = spec.kernel(j) * spec.kernel(j + 1);
        rep.min_two_step_density = std::min(rep.min_two_step_density, static_cast<double>(two.cols()) * two.minCoeff());
    }
    if (two_step == 0) rep.min_two_step_density = 0.0;
    rep.upper_ok = rep.max_density <= 1.0 / eps0;
    rep.two_step_ok = two_step > 0 && rep.min_two_step_density >= eps0;
    return rep;
}

std::vector<double> exact_means(const FiniteChainSpec& spec, std::size_t n, std::size_t max_n) {
    check_horizon(spec, n, max_n);
    std::vector<double> means(n);
    Vector nu = spec.mu1();
    for (std::size_t j = 1; j <= n; ++j) {
        const Matrix& p = spec.kernel(j);
        means[j - 1] = nu.dot(p.cwiseProduct(spec.observable(j)).rowwise().sum());
        nu = (nu.transpose() * p).transpose();
    }
    return means;
}

std::vector<double> exact_variances(const FiniteChainSpec& spec, std::size_t n) {
    check_horizon(spec, n);
    const auto means = exact_means(spec, n);
    std::vector<double> out(n);
    Vector nu = spec.mu1();
    VarianceTracker tr(nu.size());
    for (std::size_t j = 1; j <= n; ++j) {
        const Matrix& p = spec.kernel(j);
        tr.add(nu, p, spec.observable(j).array() - means[j - 1]);
        out[j - 1] = tr.var;
        nu = (nu.transpose() * p).transpose();
    }
    return out;
}

CMatrix tilted_matrix(const Matrix& kernel, const Matrix& observable, Complex z) {
    CMatrix m(kernel.rows(), kernel.cols());
    for (Eigen::Index i = 0; i < kernel.rows(); ++i)
        for (Eigen::Index j = 0; j < kernel.cols(); ++j) m(i, j) = kernel(i, j) * std::exp(z * observable(i, j));
    return m;
}

CharacteristicFunction::CharacteristicFunction(const FiniteChainSpec& spec, std::size_t n) : spec_(&spec), n_(n) {
    check_horizon(spec, n);
    const auto means = exact_means(spec, n);
    total_mean_ = 0.0;
    for (double m : means) total_mean_ += m;
}

Complex CharacteristicFunction::operator()(double t) const {
    const FiniteChainSpec& spec = *spec_;
    const Complex z(0.0, t);
    CVector row = spec.mu1().cast<Complex>();
    if (spec.rule() == StepRule::Explicit) {
        for (std::size_t j = 1; j <= n_; ++j) row = (row.transpose() * tilted_matrix(spec.kernel(j), spec.observable(j), z)).transpose();
    } else {
        const std::size_t period = spec.rule() == StepRule::Homogeneous ? 1 : spec.stored_steps();
        std::vector<CMatrix> steps;
        for (std::size_t j = 1; j <= period; ++j) steps.push_back(tilted_matrix(spec.kernel(j), spec.observable(j), z));
        CMatrix block = steps.front();
        for (std::size_t j = 1; j < period; ++j) block = block * steps[j];
        const std::size_t cycles = n_ / period, rest = n_ % period;
        // row * block^cycles by repeated squaring applied to the row vector.
        std::size_t e = cycles;
        CMatrix b = block;
        while (e > 0) {
            if (e & 1U) row = (row.transpose() * b).transpose();
            e >>= 1U;
            if (e > 0) b = b * b;
        }
        for (std::size_t j = 0; j < rest; ++j) row = (row.transpose() * steps[j]).transpose();
    }
    return row.sum() * std::exp(Complex(0.0, -t * total_mean_));
}

Complex char_fn(const FiniteChainSpec& spec, std::size_t n, double t) { return CharacteristicFunction(spec, n)(t); }

std::vector<edgeworth::CumulantVector> exact_cumulant_path(const FiniteChainSpec& spec, const std::vector<std::size_t>& ns,
                                                           int j_max, const ContourOptions& opts) {
    require(j_max >= 1 && j_max <= 8, "exact_cumulants: j_max must lie in 1..8");
    require(opts.nodes >= 2 * j_max + 2, "exact_cumulants: too few contour nodes for j_max");
    require(std::is_sorted(ns.begin(), ns.end()) && (ns.empty() || ns.front() >= 1),
            "exact_cumulants: horizons must be positive and increasing");
    if (ns.empty()) return {};
    const std::size_t n_max = ns.back();
    check_horizon(spec, n_max);

    const double fmax = spec.max_abs_observable();
    const double rho = opts.radius > 0.0 ? opts.radius : (fmax > 0.0 ? 0.1 / fmax : 0.1);
    const int N = opts.nodes;
    const auto means = exact_means(spec, n_max);
    const bool cached = spec.rule() != StepRule::Explicit;

    // gamma_log[k][i] = log E exp(z_k S_{ns[i]}), accumulated in extended precision.
    std::vector<std::vector<LComplex>> gamma_log(static_cast<std::size_t>(N), std::vector<LComplex>(ns.size()));
    for (int k = 0; k < N; ++k) {
        const LComplex z = std::polar(static_cast<long double>(rho), kTwoPiL * k / N);
        std::vector<LCMatrix> stored;
        if (cached)
            for (std::size_t s = 1; s <= spec.stored_steps(); ++s)
                stored.push_back(tilted_matrix_ld(spec.kernel(s), spec.observable(s), z));
        LCVector v = spec.mu1().cast<long double>().cast<LComplex>();
        LComplex acc = 0.0L;
        std::size_t next = 0;
        for (std::size_t j = 1; j <= n_max; ++j) {
            if (cached) {
                const std::size_t s = spec.rule() == StepRule::Homogeneous ? 0 : (j - 1) % spec.stored_steps();
                v = (v.transpose() * stored[s]).transpose();
            } else {
                v = (v.transpose() * tilted_matrix_ld(spec.kernel(j), spec.observable(j), z)).transpose();
            }
            v *= std::exp(-z * static_cast<long double>(means[j - 1]));
            const LComplex c = v.sum();
            if (!(std::abs(c) > 1e-8L) || c.real() <= 0.0L)
                throw Error(ErrorKind::IllConditioned,
                            "contour passes near a zero of the moment generating function at step " +
                                std::to_string(j) + "; shrink the radius (currently " + std::to_string(rho) + ")");
            acc += std::log(c);
            v /= c;
            while (next < ns.size() && ns[next] == j) gamma_log[static_cast<std::size_t>(k)][next++] = acc;
        }
    }

    std::vector<edgeworth::CumulantVector> out;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        edgeworth::CumulantVector cv;
        cv.subject = "S_n";
        cv.gamma.resize(static_cast<std::size_t>(j_max));
        for (int j = 1; j <= j_max; ++j) {
            LComplex sum = 0.0L;
            for (int k = 0; k < N; ++k)
                sum += gamma_log[static_cast<std::size_t>(k)][i] * std::polar(1.0L, -kTwoPiL * j * k / N);
            cv.gamma[static_cast<std::size_t>(j - 1)] =
                static_cast<double>(factorial(j) * sum.real() / (N * std::pow(static_cast<long double>(rho), j)));
        }
        cv.sigma_n = std::sqrt(std::max(cv(2), 0.0));
        out.push_back(std::move(cv));
    }
    return out;
}

edgeworth::CumulantVector exact_cumulants(const FiniteChainSpec& spec, std::size_t n, int j_max,
                                          const ContourOptions& opts) {
    return exact_cumulant_path(spec, {n}, j_max, opts).front();
}

Complex perron_log_eigenvalue(const FiniteChainSpec& spec, Complex z, const PowerIterationOptions& opts) {
    require(spec.is_homogeneous(), "perron pressure needs a homogeneous chain");
    const CMatrix M = tilted_matrix(spec.kernel(1), spec.observable(1), z);
    const Eigen::Index S = M.rows();
    require(M.cols() == S, "perron pressure needs a square kernel");

    CVector v(S);
    for (Eigen::Index i = 0; i < S; ++i) v(i) = 1.0 + static_cast<double>(i) / static_cast<double>(S);
    v.normalize();
    double best = std::numeric_limits<double>::infinity();
    Complex best_lambda = 0.0;
    // Once the tolerance is met, a few more steps bring the estimate to roundoff.
    constexpr int kPolishSteps = 50;
    int polished = -1;
    for (int it = 0; it < opts.max_iterations; ++it) {
        const CVector w = M * v;
        const Complex lambda = v.dot(w);
        if (std::abs(lambda) == 0.0) break;
        const double rel = (w - lambda * v).norm() / std::abs(lambda);
        if (rel < best) {
            best = rel;
            best_lambda = lambda;
        }
        if (polished < 0 && rel <= opts.tolerance) polished = 0;
        if (polished >= 0 && ++polished > kPolishSteps) return std::log(best_lambda);
        v = w / w.norm();
    }
    throw Error(ErrorKind::SpectralGapFailure,
                "power iteration did not converge in " + std::to_string(opts.max_iterations) +
                    " steps (periodic or reducible chain?)",
                best);
}

double perron_analytic_radius(const FiniteChainSpec& spec, double gap) {
    require(spec.is_homogeneous(), "perron radius needs a homogeneous chain");
    require(gap > 0.0 && gap < 1.0, "perron radius: gap must lie in (0, 1)");
    const double fmax = spec.max_abs_observable();
    const double r_max = fmax > 0.0 ? 2.0 / fmax : 2.0;
    constexpr int kRadii = 400;
    constexpr int kAngles = 128;
    if (spec.kernel(1).rows() < 2) return r_max;
    for (int i = 1; i <= kRadii; ++i) {
        const double r = r_max * i / kRadii;
        for (int k = 0; k < kAngles; ++k) {
            const CMatrix M = tilted_matrix(spec.kernel(1), spec.observable(1), std::polar(r, kTwoPi * k / kAngles));
            const Eigen::ComplexEigenSolver<CMatrix> es(M, false);
            std::vector<double> mags;
            for (Eigen::Index e = 0; e < es.eigenvalues().size(); ++e) mags.push_back(std::abs(es.eigenvalues()(e)));
            std::sort(mags.begin(), mags.end(), std::greater<>());
            if (!(mags[1] < (1.0 - gap) * mags[0])) return r_max * (i - 1) / kRadii;
        }
    }
    return r_max;
}

double perron_pressure(const FiniteChainSpec& spec, double z, const PowerIterationOptions& opts) {
    return perron_log_eigenvalue(spec, Complex(z, 0.0), opts).real();
}

edgeworth::StationaryCoefficients asymptotic_pq(const FiniteChainSpec& spec, int k_max, const PqOptions& opts) {
    require(spec.is_homogeneous(), "asymptotic_pq needs a homogeneous chain");
    require(k_max >= 2 && k_max <= 8, "asymptotic_pq: k_max must lie in 2..8");
    require(opts.n_check >= 1 && opts.n_check < opts.n_star, "asymptotic_pq: need n_check < n_star");
    const double fmax = spec.max_abs_observable();
    const double rho = opts.radius > 0.0 ? opts.radius : std::min(fmax > 0.0 ? 0.4 / fmax : 0.4,
                                                                   0.5 * perron_analytic_radius(spec));
    const int N = opts.nodes;

    std::vector<Complex> pi(static_cast<std::size_t>(N));
    PowerIterationOptions pio;
    for (int k = 0; k < N; ++k) pi[static_cast<std::size_t>(k)] = perron_log_eigenvalue(spec, std::polar(rho, kTwoPi * k / N), pio);
    std::vector<double> p(static_cast<std::size_t>(k_max + 1), 0.0);  // p[k] = Pi^(k)(0)
    for (int j = 1; j <= k_max; ++j) {
        Complex sum = 0.0;
        for (int k = 0; k < N; ++k) sum += pi[static_cast<std::size_t>(k)] * std::polar(1.0, -kTwoPi * j * k / N);
        p[static_cast<std::size_t>(j)] = factorial(j) * sum.real() / (N * std::pow(rho, j));
    }

    const ContourOptions copts{rho, N};
    const std::size_t horizon = std::min(opts.fit_horizon, opts.n_check);
    std::vector<std::size_t> ns;
    for (std::size_t n = 1; n <= horizon; ++n) ns.push_back(n);
    if (ns.back() < opts.n_check) ns.push_back(opts.n_check);
    ns.push_back(opts.n_star);
    const auto path = exact_cumulant_path(spec, ns, k_max, copts);
    const auto& at_star = path.back();
    const auto& at_check = path[path.size() - 2];

    edgeworth::StationaryCoefficients sc;
    const double ns_d = static_cast<double>(opts.n_star), nc_d = static_cast<double>(opts.n_check);
    for (int k = 2; k <= k_max; ++k) {
        const double pk = p[static_cast<std::size_t>(k)];
        const double q = at_star(k) - ns_d * pk;
        const double q_check = at_check(k) - nc_d * pk;
        if (std::abs(q - q_check) > opts.tolerance * std::max(1.0, std::abs(q)))
            throw Error(ErrorKind::NoGeometricRegime,
                        "q_" + std::to_string(k) + " estimates disagree: " + std::to_string(q) + " vs " +
                            std::to_string(q_check),
                        std::abs(q - q_check));
        sc.p.push_back(pk);
        sc.q.push_back(q);
    }
    sc.degenerate_variance = !(p[2] > 1e-10 * std::max(1.0, fmax * fmax));

    const auto means = exact_means(spec, opts.n_star);
    double mean_sum = 0.0;
    for (double m : means) mean_sum += m;
    sc.c = -(mean_sum - ns_d * p[1]);

    // Geometric rate of gamma_k(S_n) - n p_k - q_k over the fit horizon.
    double delta = 0.0;
    for (int k = 2; k <= k_max; ++k) {
        const double pk = sc.p_at(k), qk = sc.q_at(k);
        const double floor = 1e-9 * (1.0 + std::abs(pk) * static_cast<double>(horizon) + std::abs(qk));
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < horizon; ++i) {
            const double n = static_cast<double>(ns[i]);
            const double r = std::abs(path[i](k) - n * pk - qk);
            if (r > floor) {
                xs.push_back(n);
                ys.push_back(std::log(r));
            } else {
                break;
            }
        }
        if (xs.size() < 3) continue;
        const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sxy += (xs[i] - mx) * (ys[i] - my);
            sxx += (xs[i] - mx) * (xs[i] - mx);
        }
        delta = std::max(delta, std::exp(sxy / sxx));
    }
    sc.delta = std::min(delta, 1.0);
    return sc;
}

BlockPartition block_partition(const FiniteChainSpec& spec, std::size_t n, double A) {
    require(A > 0.0, "block_partition: A must be positive");
    check_horizon(spec, n);
    const auto means = exact_means(spec, n);

    double max_step_var = 0.0;
    {
        Vector nu = spec.mu1();
        for (std::size_t j = 1; j <= n; ++j) {
            const Matrix& p = spec.kernel(j);
            max_step_var = std::max(max_step_var, step_variance(nu, p, spec.observable(j).array() - means[j - 1]));
            nu = (nu.transpose() * p).transpose();
        }
    }
    if (A < 2.0 * max_step_var)
        throw Error(ErrorKind::InvalidBlockScale,
                    "block scale A = " + std::to_string(A) + " is below twice the largest step variance " +
                        std::to_string(max_step_var),
                    max_step_var);

    BlockPartition out;
    out.a_sequence.assign(n, 0.0);
    Vector nu = spec.mu1();
    VarianceTracker prefix(nu.size()), block(nu.size());
    std::size_t start = 1;
    double a = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const Matrix& p = spec.kernel(j);
        const Matrix g = spec.observable(j).array() - means[j - 1];
        prefix.add(nu, p, g);
        block.add(nu, p, g);
        nu = (nu.transpose() * p).transpose();
        if (block.var >= A) {
            out.blocks.emplace_back(start, j);
            out.block_variances.push_back(block.var);
            a = prefix.var;
            start = j + 1;
            block.reset(nu.size());
        }
        out.a_sequence[j - 1] = a;
    }
    out.defined = !out.blocks.empty();
    out.a_n = a;
    out.sigma2_n = prefix.var;
    out.monotone = std::is_sorted(out.a_sequence.begin(), out.a_sequence.end());
    return out;
}

double operator_norm_decay(const FiniteChainSpec& spec, double t, std::size_t n) {
    require(spec.is_homogeneous(), "operator_norm_decay needs a homogeneous chain");
    const CMatrix Mn = matrix_power(tilted_matrix(spec.kernel(1), spec.observable(1), Complex(0.0, t)), n);
    return Mn.cwiseAbs().rowwise().sum().maxCoeff();
}

LatticeLaw lattice_distribution(const FiniteChainSpec& spec, std::size_t n, std::size_t max_cells) {
    check_horizon(spec, n);
    const std::size_t stored = spec.rule() == StepRule::Explicit ? std::min(n, spec.stored_steps()) : spec.stored_steps();

    // Per stored step: offset (smallest reachable value) and span candidates.
    std::vector<double> offset(stored, 0.0);
    double scale = 0.0;
    for (std::size_t s = 0; s < stored; ++s) {
        const Matrix& p = spec.kernels()[s];
        const Matrix& f = spec.observables()[s];
        double lo = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j)
                if (p(i, j) > 0.0) {
                    lo = std::min(lo, f(i, j));
                    scale = std::max(scale, std::abs(f(i, j)));
                }
        offset[s] = lo;
    }
    const double tol = 1e-12 * std::max(1.0, scale);
    double h = 0.0;
    for (std::size_t s = 0; s < stored; ++s) {
        const Matrix& p = spec.kernels()[s];
        const Matrix& f = spec.observables()[s];
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j) {
                const double d = f(i, j) - offset[s];
                if (p(i, j) > 0.0 && d > tol) h = h == 0.0 ? d : gcd_float(h, d, tol);
            }
    }
    if (h == 0.0) h = 1.0;

    std::vector<Eigen::MatrixXi> index(stored);
    int k_max = 0;
    for (std::size_t s = 0; s < stored; ++s) {
        const Matrix& p = spec.kernels()[s];
        const Matrix& f = spec.observables()[s];
        index[s] = Eigen::MatrixXi::Zero(p.rows(), p.cols());
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j) {
                if (!(p(i, j) > 0.0)) continue;
                const double r = (f(i, j) - offset[s]) / h;
                if (std::abs(r - std::round(r)) > 1e-9 || r > 1e6)
                    throw Error(ErrorKind::NotApplicable, "observable values do not lie on a common lattice");
                index[s](i, j) = static_cast<int>(std::lround(r));
                k_max = std::max(k_max, index[s](i, j));
            }
    }
    if (h < 1e-9 * std::max(1.0, scale))
        throw Error(ErrorKind::NotApplicable, "observable values do not lie on a common lattice");

    const std::size_t width = n * static_cast<std::size_t>(k_max) + 1;
    std::size_t widest = static_cast<std::size_t>(spec.mu1().size());
    for (const auto& p : spec.kernels()) widest = std::max(widest, static_cast<std::size_t>(p.cols()));
    if (width * widest > max_cells)
        throw Error(ErrorKind::CapacityError, "lattice distribution exceeds the memory budget");

    const auto means = exact_means(spec, n);
    double shift = 0.0;
    std::vector<std::vector<double>> cur(static_cast<std::size_t>(spec.mu1().size()), std::vector<double>(width, 0.0));
    for (Eigen::Index x = 0; x < spec.mu1().size(); ++x) cur[static_cast<std::size_t>(x)][0] = spec.mu1()(x);
    std::size_t reach = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t s = spec.rule() == StepRule::Homogeneous ? 0 : (j - 1) % spec.stored_steps();
        const Matrix& p = spec.kernel(j);
        shift += offset[s] - means[j - 1];
        std::vector<std::vector<double>> nxt(static_cast<std::size_t>(p.cols()), std::vector<double>(width, 0.0));
        for (Eigen::Index x = 0; x < p.rows(); ++x) {
            const auto& row = cur[static_cast<std::size_t>(x)];
            for (Eigen::Index y = 0; y < p.cols(); ++y) {
                const double pxy = p(x, y);
                if (!(pxy > 0.0)) continue;
                const std::size_t k = static_cast<std::size_t>(index[s](x, y));
                auto& dst = nxt[static_cast<std::size_t>(y)];
                for (std::size_t i = 0; i <= reach; ++i) dst[i + k] += row[i] * pxy;
            }
        }
        reach += static_cast<std::size_t>(k_max);
        cur = std::move(nxt);
    }

    LatticeLaw law;
    law.span = h;
    for (std::size_t i = 0; i <= reach; ++i) {
        double prob = 0.0;
        for (const auto& row : cur) prob += row[i];
        if (prob > 0.0) law.atoms.push_back({shift + h * static_cast<double>(i), prob});
    }
    return law;
}

}  // namespace nuedge::markov
