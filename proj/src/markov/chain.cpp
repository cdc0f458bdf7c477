#include "nuedge/markov/chain.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "nuedge/error.hpp"
#include "nuedge/text.hpp"

namespace nuedge::markov {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr double kCenteringTol = 1e-10;
constexpr std::size_t kCenteringCheckSteps = 64;

std::string matrix_to_text(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (i) out += " ; ";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ' ';
            out += text::format_double(m(i, j));
        }
    }
    return out;
}

Matrix matrix_from_text(std::string_view s) {
    const auto rows = text::split(s, ';');
    std::vector<std::vector<double>> values;
    for (auto r : rows) values.push_back(text::parse_doubles(r));
    if (values.empty() || values.front().empty()) throw Error(ErrorKind::ParseError, "empty matrix");
    Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.front().size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != values.front().size()) throw Error(ErrorKind::ParseError, "ragged matrix rows");
        for (std::size_t j = 0; j < values[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
    }
    return m;
}

Matrix constant_rows(int states, const Vector& row) {
    Matrix m(states, row.size());
    for (int i = 0; i < states; ++i) m.row(i) = row.transpose();
    return m;
}

Matrix symmetric_switch(double q) {
    require(q >= 0.0 && q <= 1.0, "switch probability must lie in [0,1]");
    Matrix p(2, 2);
    p << 1.0 - q, q, q, 1.0 - q;
    return p;
}

// Observable depending on the destination state only.
Matrix by_destination(int states, const std::vector<double>& values) {
    Matrix f(states, static_cast<Eigen::Index>(values.size()));
    for (int i = 0; i < states; ++i)
        for (std::size_t j = 0; j < values.size(); ++j) f(i, static_cast<Eigen::Index>(j)) = values[j];
    return f;
}

std::pair<std::string, std::vector<double>> split_model_name(const std::string& model) {
    const auto open = model.find('(');
    if (open == std::string::npos) return {std::string(text::trim(model)), {}};
    if (model.back() != ')') throw Error(ErrorKind::ParseError, "malformed model name '" + model + "'");
    std::vector<double> params;
    const auto inner = std::string_view(model).substr(open + 1, model.size() - open - 2);
    if (!text::trim(inner).empty())
        for (auto p : text::split(inner, ',')) params.push_back(text::parse_double(p));
    return {std::string(text::trim(std::string_view(model).substr(0, open))), params};
}

}  // namespace

std::string to_string(StepRule rule) {
    switch (rule) {
        case StepRule::Homogeneous: return "homogeneous";
        case StepRule::Periodic: return "periodic";
        case StepRule::Explicit: return "explicit";
    }
    return "?";
}

FiniteChainSpec::FiniteChainSpec(Vector mu1, std::vector<Matrix> kernels, std::vector<Matrix> observables,
                                 StepRule rule, bool centered, std::string name)
    : mu1_(std::move(mu1)),
      kernels_(std::move(kernels)),
      observables_(std::move(observables)),
      rule_(rule),
      centered_(centered),
      name_(std::move(name)) {
    require(mu1_.size() > 0, "chain: empty initial vector");
    require((mu1_.array() >= 0.0).all() && std::abs(mu1_.sum() - 1.0) <= kStochasticTol,
            "chain: initial vector must be a probability vector");
    require(!kernels_.empty(), "chain: no kernels");
    require(kernels_.size() == observables_.size(), "chain: kernel and observable counts differ");
    require(rule_ != StepRule::Homogeneous || kernels_.size() == 1, "chain: homogeneous rule takes one kernel");
    require(kernels_.front().rows() == mu1_.size(), "chain: first kernel does not match the initial vector");

    for (std::size_t k = 0; k < kernels_.size(); ++k) {
        const Matrix& p = kernels_[k];
        const Matrix& f = observables_[k];
        const std::string where = "chain step " + std::to_string(k + 1) + ": ";
        require(p.rows() == f.rows() && p.cols() == f.cols(), where + "observable shape differs from kernel");
        require((p.array() >= 0.0).all(), where + "negative transition probability");
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            require(std::abs(p.row(i).sum() - 1.0) <= kStochasticTol, where + "kernel row does not sum to 1");
        require(f.allFinite(), where + "non-finite observable");
        const bool last = k + 1 == kernels_.size();
        if (!last) require(p.cols() == kernels_[k + 1].rows(), where + "state counts of consecutive kernels differ");
        if (last && rule_ != StepRule::Explicit)
            require(p.cols() == kernels_.front().rows(), where + "state count does not close the cycle");
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j)
                if (p(i, j) > 0.0) max_abs_f_ = std::max(max_abs_f_, std::abs(f(i, j)));
    }

    if (centered_) {
        Vector nu = mu1_;
        const std::size_t steps = std::min(max_steps(), std::max(kCenteringCheckSteps, kernels_.size()));
        for (std::size_t j = 1; j <= steps; ++j) {
            const Matrix& p = kernel(j);
            const double mean = (nu.asDiagonal() * p.cwiseProduct(observable(j))).sum();
            if (std::abs(mean) > kCenteringTol)
                throw Error(ErrorKind::ContractViolation,
                            "chain marked centered but E f_" + std::to_string(j) + " = " + text::format_double(mean));
            nu = (nu.transpose() * p).transpose();
        }
    }
}

FiniteChainSpec FiniteChainSpec::homogeneous(Vector mu1, Matrix kernel, Matrix observable, bool centered,
                                             std::string name) {
    return FiniteChainSpec(std::move(mu1), {std::move(kernel)}, {std::move(observable)}, StepRule::Homogeneous,
                           centered, std::move(name));
}

std::size_t FiniteChainSpec::max_steps() const noexcept {
    return rule_ == StepRule::Explicit ? kernels_.size() : std::numeric_limits<std::size_t>::max();
}

std::size_t FiniteChainSpec::index(std::size_t j) const {
    require(j >= 1, "chain steps are numbered from 1");
    switch (rule_) {
        case StepRule::Homogeneous: return 0;
        case StepRule::Periodic: return (j - 1) % kernels_.size();
        case StepRule::Explicit:
            require(j <= kernels_.size(), "chain: step " + std::to_string(j) + " beyond the explicit kernel list");
            return j - 1;
    }
    return 0;
}

const Matrix& FiniteChainSpec::kernel(std::size_t j) const { return kernels_[index(j)]; }
const Matrix& FiniteChainSpec::observable(std::size_t j) const { return observables_[index(j)]; }

bool operator==(const FiniteChainSpec& a, const FiniteChainSpec& b) {
    if (a.rule_ != b.rule_ || a.centered_ != b.centered_ || a.name_ != b.name_) return false;
    if (a.mu1_.size() != b.mu1_.size() || a.mu1_ != b.mu1_) return false;
    if (a.kernels_.size() != b.kernels_.size()) return false;
    for (std::size_t k = 0; k < a.kernels_.size(); ++k) {
        const auto& pa = a.kernels_[k];
        const auto& pb = b.kernels_[k];
        if (pa.rows() != pb.rows() || pa.cols() != pb.cols() || pa != pb) return false;
        if (a.observables_[k] != b.observables_[k]) return false;
    }
    return true;
}

std::string serialize_chain(const FiniteChainSpec& spec) {
    std::string out = "# finite-state chain\n";
    if (!spec.name().empty()) out += "name = " + spec.name() + "\n";
    out += "rule = " + to_string(spec.rule()) + "\n";
    out += "centered = " + std::string(spec.centered() ? "true" : "false") + "\n";
    out += "states = " + std::to_string(spec.mu1().size()) + "\n";
    out += "mu1 = " + text::join_doubles(std::vector<double>(spec.mu1().data(), spec.mu1().data() + spec.mu1().size())) + "\n";
    out += "steps = " + std::to_string(spec.stored_steps()) + "\n";
    for (std::size_t k = 0; k < spec.stored_steps(); ++k) {
        out += "kernel." + std::to_string(k + 1) + " = " + matrix_to_text(spec.kernels()[k]) + "\n";
        out += "observable." + std::to_string(k + 1) + " = " + matrix_to_text(spec.observables()[k]) + "\n";
    }
    return out;
}

FiniteChainSpec parse_chain(const std::string& contents) {
    std::string name;
    StepRule rule = StepRule::Homogeneous;
    bool centered = false;
    long long states = -1, steps = 1;
    std::vector<double> mu1;
    std::vector<Matrix> kernels, observables;
    auto slot = [](std::vector<Matrix>& v, const std::string& key, std::size_t prefix) -> Matrix& {
        const long long k = text::parse_int(std::string_view(key).substr(prefix));
        if (k < 1 || k > 100000) throw Error(ErrorKind::ParseError, "bad step index in '" + key + "'");
        if (v.size() < static_cast<std::size_t>(k)) v.resize(static_cast<std::size_t>(k));
        return v[static_cast<std::size_t>(k - 1)];
    };
    for (const auto& kv : text::parse_key_values(contents)) {
        if (kv.key == "name") name = kv.value;
        else if (kv.key == "rule") {
            if (kv.value == "homogeneous") rule = StepRule::Homogeneous;
            else if (kv.value == "periodic") rule = StepRule::Periodic;
            else if (kv.value == "explicit") rule = StepRule::Explicit;
            else throw Error(ErrorKind::ParseError, "line " + std::to_string(kv.line) + ": unknown rule '" + kv.value + "'");
        } else if (kv.key == "centered") centered = text::parse_bool(kv.value);
        else if (kv.key == "states") states = text::parse_int(kv.value);
        else if (kv.key == "mu1") mu1 = text::parse_doubles(kv.value);
        else if (kv.key == "steps") steps = text::parse_int(kv.value);
        else if (kv.key.rfind("kernel.", 0) == 0) slot(kernels, kv.key, 7) = matrix_from_text(kv.value);
        else if (kv.key.rfind("observable.", 0) == 0) slot(observables, kv.key, 11) = matrix_from_text(kv.value);
        else throw Error(ErrorKind::ParseError, "line " + std::to_string(kv.line) + ": unknown key '" + kv.key + "'");
    }
    if (states >= 0 && static_cast<std::size_t>(states) != mu1.size())
        throw Error(ErrorKind::ParseError, "states does not match the length of mu1");
    if (static_cast<long long>(kernels.size()) != steps || static_cast<long long>(observables.size()) != steps)
        throw Error(ErrorKind::ParseError, "expected " + std::to_string(steps) + " kernels and observables");
    for (std::size_t k = 0; k < kernels.size(); ++k)
        if (kernels[k].size() == 0 || observables[k].size() == 0)
            throw Error(ErrorKind::ParseError, "missing kernel or observable for step " + std::to_string(k + 1));
    Vector mu(static_cast<Eigen::Index>(mu1.size()));
    for (std::size_t i = 0; i < mu1.size(); ++i) mu(static_cast<Eigen::Index>(i)) = mu1[i];
    return FiniteChainSpec(std::move(mu), std::move(kernels), std::move(observables), rule, centered, std::move(name));
}

FiniteChainSpec load_chain(const std::string& path) { return parse_chain(text::read_file(path)); }

void save_chain(const FiniteChainSpec& spec, const std::string& path) { text::write_file(path, serialize_chain(spec)); }

std::vector<std::string> builtin_chain_names() {
    return {"iid-pm1", "iid-3pt-nonlattice", "two-state-markov(q)", "two-state-markov-pm1(q)",
            "inhomogeneous-periodic(q1,q2)"};
}

FiniteChainSpec builtin_chain(const std::string& model) {
    const auto [base, params] = split_model_name(model);
    auto expect = [&, &base = base, &params = params](std::size_t count) {
        if (params.size() != count)
            throw Error(ErrorKind::ParseError,
                        "model '" + base + "' takes " + std::to_string(count) + " parameter(s)");
    };
    if (base == "iid-pm1") {
        expect(0);
        Vector mu(2);
        mu << 0.5, 0.5;
        return FiniteChainSpec::homogeneous(mu, constant_rows(2, mu), by_destination(2, {-1.0, 1.0}), true, model);
    }
    if (base == "iid-3pt-nonlattice") {
        expect(0);
        Vector mu = Vector::Constant(3, 1.0 / 3.0);
        return FiniteChainSpec::homogeneous(mu, constant_rows(3, mu),
                                            by_destination(3, {0.0, 1.0, std::numbers::sqrt2}), false, model);
    }
    if (base == "two-state-markov") {
        expect(1);
        Vector mu(2);
        mu << 0.5, 0.5;
        Matrix f(2, 2);
        f << 0.0, std::numbers::sqrt2, 0.0, 1.0;
        return FiniteChainSpec::homogeneous(mu, symmetric_switch(params[0]), f, false, model);
    }
    if (base == "two-state-markov-pm1") {
        expect(1);
        Vector mu(2);
        mu << 0.5, 0.5;
        return FiniteChainSpec::homogeneous(mu, symmetric_switch(params[0]), by_destination(2, {-1.0, 1.0}), true,
                                            model);
    }
    if (base == "inhomogeneous-periodic") {
        expect(2);
        Vector mu(2);
        mu << 0.7, 0.3;
        const Matrix f = by_destination(2, {-1.0, 1.0});
        return FiniteChainSpec(mu, {symmetric_switch(params[0]), symmetric_switch(params[1])}, {f, f},
                               StepRule::Periodic, false, model);
    }
    throw Error(ErrorKind::ParseError, "unknown chain model '" + model + "'");
}

}  // namespace nuedge::markov
