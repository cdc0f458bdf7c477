#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nuedge::cli {

/// SelfNorm: W = (S - E S) / sigma_n with exact cumulants. Stationary: same W,
/// polynomials from the asymptotic coefficients p_k, q_k.
enum class NormalizationMode { SelfNorm, Stationary, SqrtN, Custom };

std::string to_string(NormalizationMode mode);
NormalizationMode parse_normalization(const std::string& text);

/// Everything a convergence study needs; text form is `key = value` lines.
struct ExperimentConfig {
    std::string model = "iid-3pt-nonlattice";  // built-in name; ignored when chain_file is set
    std::string chain_file;
    std::vector<std::size_t> n_values;
    int r = 1;
    double s = 3.0;
    std::vector<std::string> distances{"kolmogorov", "weighted_sup", "lp", "w1", "wp_upper", "wp_exact", "moment_gap"};
    std::vector<double> powers{1.0, 2.0};
    std::vector<int> moments{3};
    NormalizationMode normalization = NormalizationMode::SelfNorm;
    double custom_A = 0.0;
    double custom_B = 1.0;
    std::size_t mc_count = 100000;
    std::uint64_t seed = 1;
    double window = 8.0;
    std::size_t grid_nodes = 1601;
    double inversion_tolerance = 0.1;  // certified inversion error relative to the measured weighted sup
    double slope_margin = 0.1;
    std::string out_dir = ".";
    std::string table_file = "study.csv";
    std::string summary_file = "summary.txt";

    bool operator==(const ExperimentConfig&) const = default;
};

/// Accepts `n = 64 128 ...` or `n_geometric = start stop ratio`; the latter is
/// expanded, so serialization always writes the explicit list.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

/// Throws ContractViolation unless r >= 0, s >= 0, the sweep is strictly
/// increasing and every requested distance is known.
void validate(const ExperimentConfig& config);

std::vector<std::size_t> geometric_sweep(std::size_t start, std::size_t stop, std::size_t ratio);

bool wants(const ExperimentConfig& config, const std::string& distance);

}  // namespace nuedge::cli
