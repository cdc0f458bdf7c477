#include "nuedge/cli/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>

#include "nuedge/dist/functionals.hpp"
#include "nuedge/dist/inversion.hpp"
#include "nuedge/edgeworth/expansion.hpp"
#include "nuedge/error.hpp"
#include "nuedge/markov/analysis.hpp"
#include "nuedge/polyalg/hermite.hpp"
#include "nuedge/sim/sampling.hpp"
#include "nuedge/text.hpp"

namespace nuedge::cli {

namespace {

using dist::CdfCurve;
using dist::TailModel;

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

double weight(double x, double s) { return std::pow(1.0 + std::abs(x), s); }

std::string metric_name(const std::string& base, const char* param, double value) {
    return base + "(" + param + "=" + text::format_double(value) + ")";
}

// Psi for W = (S - A) / B from the self-normalized polynomials, by direct composition.
CdfCurve composed_expansion(const edgeworth::ExpansionPolynomials& self, int r, double a, double v) {
    const auto env = edgeworth::expansion_tail(self, r);
    const int d = env.degree;
    const double amp = std::max(env.amplitude, 1.0) * std::pow(2.0, d) * std::pow(std::max({1.0, a, std::abs(v)}), d);
    TailModel tail{amp, d, 1.0 / a, (std::abs(v) + 1.0) / a};
    auto dev = [self, r, a, v](double x) {
        const double y = a * x + v;
        const double f = edgeworth::evaluate_expansion(self, r, y);
        return f - (x >= 0.0 ? 1.0 : 0.0);
    };
    return CdfCurve::analytic(dev, tail, r == 0, "expansion(custom)");
}

std::vector<double> central_to_raw_sample_cumulants(const std::vector<double>& values, int k_max) {
    const double count = static_cast<double>(values.size());
    std::vector<double> m(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (double x : values) {
        double p = 1.0;
        for (int k = 0; k <= k_max; ++k) {
            m[static_cast<std::size_t>(k)] += p;
            p *= x;
        }
    }
    for (double& v : m) v /= count;
    return cumulants_from_moments(m, k_max);
}

struct Fit {
    double slope = 0.0, stderr_slope = 0.0, residual = 0.0;
    bool ok = false;
};

Fit loglog_fit(const std::vector<double>& n, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < n.size(); ++i)
        if (y[i] > 0.0 && std::isfinite(y[i])) {
            lx.push_back(std::log(n[i]));
            ly.push_back(std::log(y[i]));
        }
    Fit f;
    const std::size_t k = lx.size();
    if (k < 3) return f;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(k);
    my /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    f.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double e = ly[i] - (my + f.slope * (lx[i] - mx));
        rss += e * e;
    }
    f.residual = std::sqrt(rss / static_cast<double>(k));
    f.stderr_slope = std::sqrt(rss / static_cast<double>(k - 2) / sxx);
    f.ok = true;
    return f;
}

std::vector<double> positive_zeros(std::span<const double> c) {
    std::vector<double> out;
    for (double v : c) out.push_back(v + 0.0);
    return out;
}

}  // namespace

ModelSource resolve_model(const ExperimentConfig& config) {
    ModelSource m;
    if (!config.chain_file.empty()) {
        m.chain = markov::load_chain(config.chain_file);
        m.label = m.chain->name().empty() ? config.chain_file : m.chain->name();
        return m;
    }
    const auto sims = sim::builtin_sim_names();
    if (std::find(sims.begin(), sims.end(), config.model) != sims.end()) {
        m.sim_model = config.model;
        m.label = config.model;
        return m;
    }
    m.chain = markov::builtin_chain(config.model);
    m.label = config.model;
    return m;
}

std::vector<double> moments_from_cumulants(const std::vector<double>& cumulants, int k_max) {
    std::vector<double> m(static_cast<std::size_t>(k_max) + 1, 0.0);
    m[0] = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) {
            const double kj = j <= static_cast<int>(cumulants.size()) ? cumulants[static_cast<std::size_t>(j - 1)] : 0.0;
            acc += binomial(k - 1, j - 1) * kj * m[static_cast<std::size_t>(k - j)];
        }
        m[static_cast<std::size_t>(k)] = acc;
    }
    return m;
}

std::vector<double> cumulants_from_moments(const std::vector<double>& moments, int k_max) {
    require(static_cast<int>(moments.size()) > k_max, "cumulants_from_moments: not enough moments");
    std::vector<double> c(static_cast<std::size_t>(k_max), 0.0);
    for (int k = 1; k <= k_max; ++k) {
        double acc = moments[static_cast<std::size_t>(k)];
        for (int j = 1; j < k; ++j)
            acc -= binomial(k - 1, j - 1) * c[static_cast<std::size_t>(j - 1)] * moments[static_cast<std::size_t>(k - j)];
        c[static_cast<std::size_t>(k - 1)] = acc;
    }
    return c;
}

StudyPoint evaluate_point(const ExperimentConfig& config, const ModelSource& model, std::size_t n) {
    const int r = config.r;
    int k_max = r + 2;
    for (int m : config.moments) k_max = std::max(k_max, m);
    StudyPoint pt;
    pt.n = n;

    std::vector<double> gamma;  // cumulants of S_n
    std::vector<double> sample;
    if (model.chain) {
        gamma = markov::exact_cumulants(*model.chain, n, k_max).gamma;
    } else {
        require(config.normalization != NormalizationMode::SqrtN &&
                    config.normalization != NormalizationMode::Stationary,
                "stationary and sqrt-n normalizations need a chain model");
        sample = sim::sample_builtin(model.sim_model, n, config.mc_count, config.seed + n).values;
        gamma = central_to_raw_sample_cumulants(sample, k_max);
    }
    const double var = gamma.size() > 1 ? gamma[1] : 0.0;
    if (!(var > 0.0)) throw Error(ErrorKind::DegenerateVariance, "Var(S_n) vanishes at n = " + std::to_string(n));
    pt.sigma_n = std::sqrt(var);

    // Normalization and the expansion of W_n.
    edgeworth::ExpansionPolynomials self;
    if (r >= 1) {
        edgeworth::CumulantVector cv{gamma, "S_n", pt.sigma_n};
        self = edgeworth::selfnorm_polynomials(cv.reduced(r), r);
    }
    self.normalization = {0.0, pt.sigma_n, pt.sigma_n};
    const double mean = gamma[0];
    switch (config.normalization) {
        case NormalizationMode::SelfNorm:
            pt.A = mean;
            pt.B = pt.sigma_n;
            self.normalization.A_n = mean;
            pt.psi = CdfCurve::expansion(self, r);
            break;
        case NormalizationMode::Stationary: {
            const auto coeffs = markov::asymptotic_pq(*model.chain, std::max(k_max, r + 2));
            auto polys = edgeworth::stationary_polynomials(coeffs, r, r + 2);
            pt.A = mean;
            pt.B = pt.sigma_n;
            polys.normalization = {mean, pt.sigma_n, pt.sigma_n};
            pt.psi = CdfCurve::expansion(polys, r);
            break;
        }
        case NormalizationMode::SqrtN: {
            const auto coeffs = markov::asymptotic_pq(*model.chain, std::max(k_max, r + 2));
            auto polys = edgeworth::sqrtn_polynomials(coeffs, r, r + 2);
            const double p2 = coeffs.p_at(2);
            pt.A = mean + coeffs.c;
            pt.B = std::sqrt(p2 * static_cast<double>(n));
            polys.normalization = {pt.A, pt.B, pt.sigma_n};
            pt.psi = CdfCurve::expansion(polys, r);
            break;
        }
        case NormalizationMode::Custom:
            pt.A = config.custom_A;
            pt.B = config.custom_B;
            pt.psi = composed_expansion(self, r, pt.B / pt.sigma_n, (pt.A - mean) / pt.sigma_n);
            break;
    }
    pt.cumulants.resize(gamma.size());
    for (std::size_t j = 0; j < gamma.size(); ++j)
        pt.cumulants[j] = (j == 0 ? gamma[0] - pt.A : gamma[j]) / std::pow(pt.B, static_cast<double>(j + 1));
    const double skew = gamma.size() > 2 ? gamma[2] / std::pow(pt.sigma_n, 3) : 0.0;
    pt.half_width = std::max(config.window, dist::default_half_width(skew));

    if (!model.chain) {
        for (double& x : sample) x = (x - pt.A) / pt.B;
        pt.F = CdfCurve::empirical(std::move(sample));
        pt.source = "mc";
        return pt;
    }

    const auto& spec = *model.chain;
    try {
        const auto law = markov::lattice_distribution(spec, n);
        std::vector<dist::Atom> atoms;
        atoms.reserve(law.atoms.size());
        for (const auto& a : law.atoms) atoms.push_back({(a.value - pt.A) / pt.B, a.prob});
        pt.F = CdfCurve::atoms(std::move(atoms));
        pt.source = "exact";
        return pt;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotApplicable && e.kind() != ErrorKind::CapacityError) throw;
    }

    // Hoeffding-type envelope for the tails beyond the inversion grid.
    double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
    for (const auto& f : spec.observables()) {
        fmin = std::min(fmin, f.minCoeff());
        fmax = std::max(fmax, f.maxCoeff());
    }
    const double range = std::max(fmax - fmin, 1e-300);
    const double nn = static_cast<double>(n);
    const double inflation = std::max(1.0, 4.0 * var / (nn * range * range));
    TailModel tail{2.0 * std::sqrt(2.0 * std::numbers::pi), 0, range * std::sqrt(nn * inflation) / (2.0 * pt.B),
                   std::abs(mean - pt.A) / pt.B};

    const double h = 2.0 * config.window / static_cast<double>(config.grid_nodes - 1);
    const auto half_nodes = static_cast<std::size_t>(std::ceil(pt.half_width / h));
    pt.half_width = h * static_cast<double>(half_nodes);
    pt.grid = dist::uniform_grid(pt.half_width, 2 * half_nodes + 1);
    const markov::CharacteristicFunction cf(spec, n);
    const double B = pt.B, shift = pt.A - mean;
    const dist::CharFn psi = [&cf, B, shift](double t) {
        return cf(t / B) * std::polar(1.0, -t * shift / B);
    };
    dist::InversionOptions opts;
    opts.tolerance = std::numeric_limits<double>::infinity();
    opts.tail = tail;
    auto inv = dist::invert_cf(psi, pt.grid, opts);
    pt.F = std::move(inv.curve);
    pt.node_errors = std::move(inv.node_errors);
    pt.source = "inverted";
    return pt;
}

double certified_inversion_error(const StudyPoint& point, double s, double window) {
    double e = 0.0;
    for (std::size_t i = 0; i < point.grid.size(); ++i)
        if (std::abs(point.grid[i]) <= window) e = std::max(e, weight(point.grid[i], s) * point.node_errors[i]);
    return e;
}

bool StudyReport::consistent() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConsistencyCheck& c) { return c.ok; });
}

std::vector<double> StudyReport::column(const std::string& name) const {
    std::vector<double> out;
    if (name == "sigma_n") {
        for (const auto& row : rows) out.push_back(row.sigma_n);
        return out;
    }
    if (name == "n") {
        for (const auto& row : rows) out.push_back(static_cast<double>(row.n));
        return out;
    }
    if (name == "inversion_error") {
        for (const auto& row : rows) out.push_back(row.inversion_error);
        return out;
    }
    const auto it = std::find(metric_columns.begin(), metric_columns.end(), name);
    require(it != metric_columns.end(), "study has no column '" + name + "'");
    const auto k = static_cast<std::size_t>(it - metric_columns.begin());
    for (const auto& row : rows) out.push_back(row.metrics[k]);
    return out;
}

StudyReport run_study(const ExperimentConfig& config) {
    validate(config);
    StudyReport rep;
    rep.config = config;
    const double r = config.r;

    // Column layout and predicted exponents in powers of n.
    std::vector<std::pair<std::string, double>> layout;
    if (wants(config, "kolmogorov")) layout.emplace_back("kolmogorov", -r / 2.0);
    if (wants(config, "weighted_sup")) layout.emplace_back(metric_name("weighted_sup", "s", config.s), -r / 2.0);
    if (wants(config, "lp"))
        for (double p : config.powers) layout.emplace_back(metric_name("lp", "p", p), -r / 2.0);
    if (wants(config, "w1")) layout.emplace_back("w1", -0.5);
    if (wants(config, "wp_upper"))
        for (double p : config.powers) layout.emplace_back(metric_name("wp_upper", "p", p), -r / (2.0 * p));
    if (wants(config, "wp_exact"))
        for (double p : config.powers) layout.emplace_back(metric_name("wp_exact", "p", p), -0.5);
    if (wants(config, "moment_gap"))
        for (int k : config.moments) layout.emplace_back(metric_name("moment_gap", "k", k), -r / 2.0);
    for (const auto& [name, e] : layout) {
        rep.metric_columns.push_back(name);
        rep.expected_exponents.push_back(e);
    }
    if (config.n_values.empty()) {
        rep.model_label = config.chain_file.empty() ? config.model : config.chain_file;
        return rep;
    }

    const auto model = resolve_model(config);
    rep.model_label = model.label;
    const auto phi = CdfCurve::normal(0.0, 1.0);
    ConsistencyCheck certified{"inversion_certified", true, ""};
    ConsistencyCheck ordering{"wp_exact_le_wp_upper", true, ""};
    ConsistencyCheck finite{"finite_metrics", true, ""};

    for (std::size_t n : config.n_values) {
        const auto pt = evaluate_point(config, model, n);
        dist::GridOptions grid;
        grid.half_width = pt.half_width;
        dist::GridOptions windowed = grid;
        windowed.window = config.window;

        StudyRow row;
        row.n = n;
        row.sigma_n = pt.sigma_n;
        row.source = pt.source;
        double wsup = std::numeric_limits<double>::quiet_NaN();
        for (const auto& name : rep.metric_columns) {
            double v = 0.0;
            if (name == "kolmogorov") v = dist::kolmogorov(pt.F, pt.psi, grid);
            else if (name.rfind("weighted_sup", 0) == 0) v = wsup = dist::weighted_sup(pt.F, pt.psi, config.s, windowed);
            else if (name == "w1") v = dist::wp_exact(pt.F, phi, 1.0, grid);
            else {
                const auto eq = name.find('=');
                const double param = text::parse_double(std::string_view(name).substr(eq + 1, name.size() - eq - 2));
                if (name.rfind("lp", 0) == 0) v = dist::lp_distance(pt.F, pt.psi, param, grid);
                else if (name.rfind("wp_upper", 0) == 0) v = dist::wp_upper(pt.F, pt.psi, param, grid);
                else if (name.rfind("wp_exact", 0) == 0) {
                    v = dist::wp_exact(pt.F, phi, param, grid);
                    const double upper = dist::wp_upper(pt.F, phi, param, grid);
                    if (v > upper * (1.0 + 1e-6) + 1e-12) {
                        ordering.ok = false;
                        ordering.detail += "n=" + std::to_string(n) + " p=" + text::format_double(param) + "; ";
                    }
                } else {
                    const int k = static_cast<int>(param);
                    const auto mom = moments_from_cumulants(pt.cumulants, k);
                    const double gauss = k % 2 ? 0.0 : std::tgamma(k + 1.0) / (std::pow(2.0, k / 2) * std::tgamma(k / 2 + 1.0));
                    const auto h_prime = [k](double x) { return k * std::pow(x, k - 1); };
                    const double psi_moment = gauss - dist::expectation_difference(h_prime, phi, pt.psi, grid);
                    v = std::abs(mom[static_cast<std::size_t>(k)] - psi_moment);
                }
            }
            if (!std::isfinite(v)) {
                finite.ok = false;
                finite.detail += name + " at n=" + std::to_string(n) + "; ";
            }
            row.metrics.push_back(v);
        }
        if (pt.source == "inverted") {
            row.inversion_error = certified_inversion_error(pt, config.s, config.window);
            const double reference = std::isfinite(wsup) ? wsup : dist::weighted_sup(pt.F, pt.psi, config.s, windowed);
            if (!(row.inversion_error <= config.inversion_tolerance * reference)) {
                certified.ok = false;
                certified.detail += "n=" + std::to_string(n) + " error " + text::format_double(row.inversion_error) +
                                    " vs " + text::format_double(reference) + "; ";
            }
        }
        rep.rows.push_back(std::move(row));
    }
    rep.checks = {certified, ordering, finite};

    const auto ns = rep.column("n");
    const auto sig = rep.column("sigma_n");
    for (std::size_t c = 0; c < rep.metric_columns.size(); ++c) {
        const auto y = rep.column(rep.metric_columns[c]);
        const auto f = loglog_fit(ns, y);
        SlopeFit fit;
        fit.column = rep.metric_columns[c];
        fit.expected = rep.expected_exponents[c];
        fit.slope = f.slope;
        fit.stderr_slope = f.stderr_slope;
        fit.residual = f.residual;
        fit.scaled_decreasing = y.size() >= 2;
        for (std::size_t i = 1; i < y.size(); ++i) {
            const double prev = y[i - 1] * std::pow(sig[i - 1], -2.0 * fit.expected);
            const double cur = y[i] * std::pow(sig[i], -2.0 * fit.expected);
            if (!(cur < prev)) fit.scaled_decreasing = false;
        }
        fit.pass = f.ok && fit.slope + fit.residual <= fit.expected + config.slope_margin;
        rep.fits.push_back(fit);
    }
    return rep;
}

std::string format_table(const StudyReport& report) {
    std::ostringstream out;
    out << "n,sigma_n,source,inversion_error";
    for (const auto& c : report.metric_columns) out << ',' << c;
    out << '\n';
    for (const auto& row : report.rows) {
        out << row.n << ',' << text::format_double(row.sigma_n) << ',' << row.source << ','
            << text::format_double(row.inversion_error);
        for (double v : row.metrics) out << ',' << text::format_double(v);
        out << '\n';
    }
    return out.str();
}

std::string format_summary(const StudyReport& report) {
    std::ostringstream out;
    const auto& c = report.config;
    out << "model = " << report.model_label << '\n';
    out << "normalization = " << to_string(c.normalization) << '\n';
    out << "r = " << c.r << '\n';
    out << "s = " << text::format_double(c.s) << '\n';
    out << "seed = " << c.seed << '\n';
    out << "rows = " << report.rows.size() << '\n';
    out << "slope_margin = " << text::format_double(c.slope_margin) << '\n';
    for (const auto& chk : report.checks) {
        out << "check." << chk.name << " = " << (chk.ok ? "PASS" : "FAIL") << '\n';
        if (!chk.detail.empty()) out << "check." << chk.name << ".detail = " << chk.detail << '\n';
    }
    for (const auto& f : report.fits) {
        const std::string key = "fit." + f.column;
        out << key << ".slope = " << text::format_double(f.slope) << '\n';
        out << key << ".stderr = " << text::format_double(f.stderr_slope) << '\n';
        out << key << ".residual = " << text::format_double(f.residual) << '\n';
        out << key << ".expected = " << text::format_double(f.expected) << '\n';
        out << key << ".scaled_decreasing = " << (f.scaled_decreasing ? "yes" : "no") << '\n';
        out << key << ".status = " << (f.pass ? "PASS" : "FAIL") << '\n';
    }
    out << "status = " << (report.consistent() ? "PASS" : "FAIL") << '\n';
    return out.str();
}

int run_convergence_study(const ExperimentConfig& config) {
    const auto report = run_study(config);
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    text::write_file((dir / config.table_file).string(), format_table(report));
    text::write_file((dir / config.summary_file).string(), format_summary(report));
    return report.consistent() ? 0 : 1;
}

std::string expand_report(const std::vector<double>& cumulants, int r) {
    require(cumulants.size() >= 1 && cumulants[0] > 0.0, "expand needs gamma_2 > 0 first");
    require(r >= 1, "expand needs order r >= 1");
    require(static_cast<int>(cumulants.size()) >= r + 1, "expand needs gamma_2 .. gamma_{r+2}");
    std::vector<double> gamma{0.0};
    gamma.insert(gamma.end(), cumulants.begin(), cumulants.end());
    const double sigma = std::sqrt(cumulants[0]);
    edgeworth::CumulantVector cv{gamma, "S_n", sigma};
    const auto polys = edgeworth::selfnorm_polynomials(cv.reduced(r), r);
    std::ostringstream out;
    out << "sigma_n = " << text::format_double(sigma) << '\n';
    out << "# Psi(x) = Phi(x) + phi(x) sum_j sigma_n^-j P_j(x); coefficients in increasing degree\n";
    for (int j = 1; j <= r; ++j) {
        const auto c = polys.polys[static_cast<std::size_t>(j - 1)].coeffs();
        out << "P_" << j << " = " << text::join_doubles(positive_zeros(c)) << '\n';
    }
    return out.str();
}

std::string chain_analysis_report(const markov::FiniteChainSpec& spec, int k_max) {
    std::ostringstream out;
    out << "name = " << spec.name() << '\n';
    out << "rule = " << markov::to_string(spec.rule()) << '\n';
    out << "states = " << spec.mu1().size() << '\n';
    const auto ell = markov::check_ellipticity(spec, 1e-6);
    out << "ellipticity.upper_ok = " << (ell.upper_ok ? "yes" : "no") << '\n';
    out << "ellipticity.two_step_ok = " << (ell.two_step_ok ? "yes" : "no") << '\n';
    out << "ellipticity.max_density = " << text::format_double(ell.max_density) << '\n';
    out << "ellipticity.min_two_step_density = " << text::format_double(ell.min_two_step_density) << '\n';
    if (!spec.is_homogeneous()) {
        out << "pressure = not applicable (inhomogeneous chain)\n";
        return out.str();
    }
    for (double z : {-0.5, -0.1, 0.1, 0.5})
        out << "pressure(" << text::format_double(z) << ") = " << text::format_double(markov::perron_pressure(spec, z))
            << '\n';
    const auto pq = markov::asymptotic_pq(spec, k_max);
    for (int k = 2; k <= k_max; ++k) {
        out << "p_" << k << " = " << text::format_double(pq.p_at(k)) << '\n';
        out << "q_" << k << " = " << text::format_double(pq.q_at(k)) << '\n';
    }
    out << "c = " << text::format_double(pq.c) << '\n';
    out << "delta = " << text::format_double(pq.delta) << '\n';
    out << "degenerate_variance = " << (pq.degenerate_variance ? "yes" : "no") << '\n';
    return out.str();
}

}  // namespace nuedge::cli
