#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nuedge/dist/curve.hpp"
#include "nuedge/markov/chain.hpp"

namespace nuedge::sim {

/// Philox4x32-10 counter-based generator. Stream (seed, trajectory) is the
/// 64-bit key plus the high counter half; draws advance the low counter half.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Uniform on (0, 1).
    double uniform_open() noexcept;

    /// One Philox4x32-10 block.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

struct SampleBatch {
    std::vector<double> values;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string model;
};

/// One value per line, preceded by `# model=<m> n=<n> seed=<s> count=<c>`.
std::string serialize_batch(const SampleBatch& batch);
SampleBatch parse_batch(const std::string& text);

/// Centered additive functional S_n of `count` independent trajectories.
SampleBatch sample_chain(const markov::FiniteChainSpec& spec, std::size_t n, std::size_t count, std::uint64_t seed);

inline constexpr std::size_t kExactDoublingSteps = 50;
inline constexpr std::size_t kMaxDoublingSteps = 100000000;

/// S_n = sum_{j<n} g(T^j x_0) for T x = 2x mod 1 and uniform x_0.
SampleBatch doubling_map_sum(const std::function<double(double)>& observable, std::size_t n, std::size_t count,
                             std::uint64_t seed);

/// Random product of invertible 2x2 matrices drawn iid with the given weights.
class RandomMatrixProduct {
public:
    RandomMatrixProduct(std::vector<Eigen::Matrix2d> matrices, std::vector<double> probs);
    /// S_n(x) = log(|g_n ... g_1 x| / |x|).
    SampleBatch lognorm(const Eigen::Vector2d& x, std::size_t n, std::size_t count, std::uint64_t seed) const;

private:
    std::vector<Eigen::Matrix2d> matrices_;
    std::vector<double> cumulative_;
};

SampleBatch random_matrix_lognorm(const std::vector<Eigen::Matrix2d>& matrices, const std::vector<double>& probs,
                                  const Eigen::Vector2d& x, std::size_t n, std::size_t count, std::uint64_t seed);

/// Density proportional to (sin x / x)^{2m}, rescaled to unit variance, sampled
/// by rejection from the envelope (1 + x^2 / (2m))^{-m}.
class SmoothingNoise {
public:
    explicit SmoothingNoise(int m);

    int m() const noexcept { return m_; }
    /// int (sin x / x)^{2m} dx.
    double normalizer() const noexcept { return lambda_; }
    double raw_variance() const noexcept { return raw_variance_; }
    /// Acceptance probability of the rejection step.
    double acceptance() const noexcept { return acceptance_; }
    /// The characteristic function of the unit-variance noise vanishes beyond this.
    double support_bound() const noexcept;
    /// Unit-variance density at x.
    double density(double x) const;

    SampleBatch sample(std::size_t count, std::uint64_t seed) const;

private:
    int m_;
    double lambda_ = 0.0;
    double raw_variance_ = 0.0;
    double envelope_scale_ = 0.0;
    double envelope_bound_ = 0.0;
    double acceptance_ = 0.0;
};

SampleBatch sample_smoothing_noise(int m, std::size_t count, std::uint64_t seed);

/// Right-continuous step CDF of the batch.
dist::CdfCurve empirical_cdf(const SampleBatch& batch);

/// Dvoretzky-Kiefer-Wolfowitz band: P(sup |F_N - F| > eps) <= alpha.
double dkw_epsilon(std::size_t count, double alpha);

/// Built-in simulation models "doubling-cos" and "random-matrix-diag".
SampleBatch sample_builtin(const std::string& model, std::size_t n, std::size_t count, std::uint64_t seed);
std::vector<std::string> builtin_sim_names();

}  // namespace nuedge::sim
