#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <string>
#include <vector>

namespace nuedge::markov {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// How per-step kernels are generated from the stored list.
enum class StepRule {
    Homogeneous,  // one kernel for every step
    Periodic,     // step j uses entry (j-1) mod period
    Explicit,     // step j uses entry j-1; steps beyond the list are invalid
};

std::string to_string(StepRule rule);

/// Finite-state Markov chain X_1, X_2, ... with step-j kernel p_j (rows indexed
/// by X_j, columns by X_{j+1}) and observable f_j(X_j, X_{j+1}). The additive
/// functional studied is S_n = sum_{j<=n} (f_j(X_j, X_{j+1}) - E f_j).
class FiniteChainSpec {
public:
    FiniteChainSpec(Vector mu1, std::vector<Matrix> kernels, std::vector<Matrix> observables, StepRule rule,
                    bool centered = false, std::string name = {});

    static FiniteChainSpec homogeneous(Vector mu1, Matrix kernel, Matrix observable, bool centered = false,
                                       std::string name = {});

    StepRule rule() const noexcept { return rule_; }
    bool is_homogeneous() const noexcept { return rule_ == StepRule::Homogeneous; }
    /// Number of stored kernels (period for periodic rules).
    std::size_t stored_steps() const noexcept { return kernels_.size(); }
    /// Largest usable horizon; unbounded rules report SIZE_MAX.
    std::size_t max_steps() const noexcept;
    const Vector& mu1() const noexcept { return mu1_; }
    bool centered() const noexcept { return centered_; }
    const std::string& name() const noexcept { return name_; }

    /// Kernel and observable of step j >= 1.
    const Matrix& kernel(std::size_t j) const;
    const Matrix& observable(std::size_t j) const;
    const std::vector<Matrix>& kernels() const noexcept { return kernels_; }
    const std::vector<Matrix>& observables() const noexcept { return observables_; }

    /// max |f_j(x,y)| over stored entries with p_j(x,y) > 0.
    double max_abs_observable() const noexcept { return max_abs_f_; }

    friend bool operator==(const FiniteChainSpec& a, const FiniteChainSpec& b);

private:
    std::size_t index(std::size_t j) const;

    Vector mu1_;
    std::vector<Matrix> kernels_;
    std::vector<Matrix> observables_;
    StepRule rule_;
    bool centered_;
    std::string name_;
    double max_abs_f_ = 0.0;
};

/// Key-value text form: `key = value`, `#` comments, matrix rows separated by `;`.
std::string serialize_chain(const FiniteChainSpec& spec);
FiniteChainSpec parse_chain(const std::string& text);
FiniteChainSpec load_chain(const std::string& path);
void save_chain(const FiniteChainSpec& spec, const std::string& path);

/// Built-in models by name, e.g. "two-state-markov(0.3)".
FiniteChainSpec builtin_chain(const std::string& model);
std::vector<std::string> builtin_chain_names();

}  // namespace nuedge::markov
