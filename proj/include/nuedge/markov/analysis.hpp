#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "nuedge/edgeworth/expansion.hpp"
#include "nuedge/markov/chain.hpp"

namespace nuedge::markov {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr std::size_t kDefaultMaxSteps = 1000000;

struct EllipticityReport {
    bool upper_ok = false;
    bool two_step_ok = false;
    double max_density = 0.0;           // max S_{j+1} p_j(x,y)
    double min_two_step_density = 0.0;  // min S_{j+2} (p_j p_{j+1})(x,z)
};

/// Densities are taken against the uniform measure on the target states.
EllipticityReport check_ellipticity(const FiniteChainSpec& spec, double eps0);

/// E f_j(X_j, X_{j+1}) for j = 1..n.
std::vector<double> exact_means(const FiniteChainSpec& spec, std::size_t n, std::size_t max_n = kDefaultMaxSteps);

/// Var(S_k) for k = 1..n.
std::vector<double> exact_variances(const FiniteChainSpec& spec, std::size_t n);

/// psi_n(t) = E exp(i t S_n) for the centered sum; reusable across t.
class CharacteristicFunction {
public:
    CharacteristicFunction(const FiniteChainSpec& spec, std::size_t n);
    Complex operator()(double t) const;
    std::size_t n() const noexcept { return n_; }

private:
    const FiniteChainSpec* spec_;
    std::size_t n_;
    double total_mean_;
};

Complex char_fn(const FiniteChainSpec& spec, std::size_t n, double t);

/// M_z[x,y] = p(x,y) exp(z f(x,y)).
CMatrix tilted_matrix(const Matrix& kernel, const Matrix& observable, Complex z);

struct ContourOptions {
    double radius = 0.0;  // 0 selects 0.1 / max|f|
    int nodes = 64;
};

/// Cumulants of S_n by Cauchy contour differentiation of log E exp(z S_n).
edgeworth::CumulantVector exact_cumulants(const FiniteChainSpec& spec, std::size_t n, int j_max,
                                          const ContourOptions& opts = {});

/// Same as exact_cumulants for every n in the increasing list, in one pass.
std::vector<edgeworth::CumulantVector> exact_cumulant_path(const FiniteChainSpec& spec,
                                                           const std::vector<std::size_t>& ns, int j_max,
                                                           const ContourOptions& opts = {});

struct PowerIterationOptions {
    double tolerance = 1e-13;
    int max_iterations = 100000;
};

/// log of the leading eigenvalue of M_z (principal branch) for a homogeneous spec.
Complex perron_log_eigenvalue(const FiniteChainSpec& spec, Complex z, const PowerIterationOptions& opts = {});
/// Largest r such that on every circle |z| <= r the second eigenvalue of M_z
/// stays below (1 - gap) times the first in modulus (scanned, capped at 2 / max|f|).
double perron_analytic_radius(const FiniteChainSpec& spec, double gap = 0.1);
/// Pi(z) = log spectral radius of M_z for real z.
double perron_pressure(const FiniteChainSpec& spec, double z, const PowerIterationOptions& opts = {});

struct PqOptions {
    std::size_t n_star = 1024;
    std::size_t n_check = 512;
    double tolerance = 1e-5;
    double radius = 0.0;  // 0 selects min(0.4 / max|f|, perron_analytic_radius / 2)
    int nodes = 64;
    std::size_t fit_horizon = 64;
};

/// p_k = Pi^(k)(0), q_k = gamma_k(S_{n*}) - n* p_k, k = 2..k_max; c is the limit of
/// sum_j E f_j - n p_1 with the sign of a centering constant A_n.
edgeworth::StationaryCoefficients asymptotic_pq(const FiniteChainSpec& spec, int k_max, const PqOptions& opts = {});

struct BlockPartition {
    std::vector<std::pair<std::size_t, std::size_t>> blocks;  // inclusive step ranges
    std::vector<double> block_variances;
    bool defined = false;                 // at least one complete block
    double a_n = 0.0;                     // Var of the sum over complete blocks
    double sigma2_n = 0.0;                // Var(S_n)
    std::vector<double> a_sequence;       // a_k for k = 1..n, 0 before the first block
    bool monotone = false;
};

BlockPartition block_partition(const FiniteChainSpec& spec, std::size_t n, double A);

/// Max absolute row sum of M_{it}^n.
double operator_norm_decay(const FiniteChainSpec& spec, double t, std::size_t n);

struct Atom {
    double value;
    double prob;
};

struct LatticeLaw {
    double span = 0.0;
    std::vector<Atom> atoms;  // sorted by value, zero-probability atoms dropped
};

/// Exact law of the centered S_n when every observable value lies on a common lattice.
LatticeLaw lattice_distribution(const FiniteChainSpec& spec, std::size_t n, std::size_t max_cells = 50000000);

}  // namespace nuedge::markov
