#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nuedge/cli/config.hpp"
#include "nuedge/dist/curve.hpp"
#include "nuedge/markov/chain.hpp"

namespace nuedge::cli {

/// A chain model (exact laws) or a simulation-only model (Monte Carlo laws).
struct ModelSource {
    std::optional<markov::FiniteChainSpec> chain;
    std::string sim_model;
    std::string label;
};

ModelSource resolve_model(const ExperimentConfig& config);

/// Law of W_n = (S_n - A) / B and its expansion at one sweep point.
struct StudyPoint {
    std::size_t n = 0;
    double sigma_n = 0.0;
    double A = 0.0;
    double B = 1.0;
    dist::CdfCurve F;
    dist::CdfCurve psi;
    std::string source;            // "exact", "inverted" or "mc"
    double half_width = 8.0;
    std::vector<double> grid;      // inversion nodes (inverted laws only)
    std::vector<double> node_errors;
    std::vector<double> cumulants; // cumulants of W_n, index j-1
};

StudyPoint evaluate_point(const ExperimentConfig& config, const ModelSource& model, std::size_t n);

/// max over inversion nodes with |x| <= window of (1 + |x|)^s node_error; zero for exact laws.
double certified_inversion_error(const StudyPoint& point, double s, double window);

/// Raw moments E W^k for k = 0..k_max from cumulants (index j-1 holds kappa_j).
std::vector<double> moments_from_cumulants(const std::vector<double>& cumulants, int k_max);
/// Cumulants kappa_1..kappa_k_max from raw moments (index k holds E W^k).
std::vector<double> cumulants_from_moments(const std::vector<double>& moments, int k_max);

struct StudyRow {
    std::size_t n = 0;
    double sigma_n = 0.0;
    std::string source;
    double inversion_error = 0.0;
    std::vector<double> metrics;  // aligned with StudyReport::metric_columns
};

struct SlopeFit {
    std::string column;
    double slope = 0.0;
    double stderr_slope = 0.0;
    double residual = 0.0;  // rms residual of the log-log fit
    double expected = 0.0;  // predicted exponent in powers of n
    bool scaled_decreasing = false;
    bool pass = false;
};

struct ConsistencyCheck {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct StudyReport {
    ExperimentConfig config;
    std::string model_label;
    std::vector<std::string> metric_columns;
    std::vector<double> expected_exponents;
    std::vector<StudyRow> rows;
    std::vector<SlopeFit> fits;
    std::vector<ConsistencyCheck> checks;

    bool consistent() const;
    /// Column values over the sweep; throws ContractViolation for unknown names.
    std::vector<double> column(const std::string& name) const;
};

StudyReport run_study(const ExperimentConfig& config);

std::string format_table(const StudyReport& report);
std::string format_summary(const StudyReport& report);

/// Runs the study and writes the table and summary under config.out_dir.
/// Returns the process exit code: 0 iff every consistency check passed.
int run_convergence_study(const ExperimentConfig& config);

/// Text for the `expand` verb: polynomials for cumulants gamma_2, gamma_3, ... of S_n.
std::string expand_report(const std::vector<double>& cumulants, int r);

/// Text for the `chain-analyze` verb.
std::string chain_analysis_report(const markov::FiniteChainSpec& spec, int k_max);

}  // namespace nuedge::cli
