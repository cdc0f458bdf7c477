#include "nuedge/sim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "nuedge/error.hpp"
#include "nuedge/markov/analysis.hpp"
#include "nuedge/text.hpp"

namespace nuedge::sim {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

// Runs body(i) for i in [0, count) on several threads; each index is written by
// exactly one thread, so results do not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body body) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), std::max<std::size_t>(1, count / 256));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(count, lo + chunk);
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

std::size_t draw_index(const std::vector<double>& cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulative_of(const Eigen::VectorXd& p) {
    std::vector<double> c(static_cast<std::size_t>(p.size()));
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) c[static_cast<std::size_t>(i)] = acc += p(i);
    return c;
}

double sinc_power(double x, int m) {
    const double s = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return std::pow(s * s, m);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

std::array<std::uint32_t, 4> CounterRng::block(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k[0] += kPhiloxW0;
            k[1] += kPhiloxW1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return c;
}

CounterRng::result_type CounterRng::operator()() noexcept {
    if (used_ >= 4) {
        buffer_ = block({static_cast<std::uint32_t>(counter_), static_cast<std::uint32_t>(counter_ >> 32),
                         static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                        key_);
        ++counter_;
        used_ = 0;
    }
    const std::uint64_t lo = buffer_[static_cast<std::size_t>(used_)];
    const std::uint64_t hi = buffer_[static_cast<std::size_t>(used_ + 1)];
    used_ += 2;
    return (hi << 32) | lo;
}

double CounterRng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open() noexcept { return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52; }

std::string serialize_batch(const SampleBatch& batch) {
    std::ostringstream out;
    out << "# model=" << batch.model << " n=" << batch.n << " seed=" << batch.seed << " count=" << batch.values.size()
        << '\n';
    for (double v : batch.values) out << text::format_double(v) << '\n';
    return out.str();
}

SampleBatch parse_batch(const std::string& text_in) {
    std::istringstream in(text_in);
    std::string line;
    SampleBatch b;
    std::size_t declared = 0;
    bool header = false;
    while (std::getline(in, line)) {
        const auto t = text::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            for (const auto tok : text::split(t.substr(1), ' ')) {
                const auto eq = tok.find('=');
                if (eq == std::string_view::npos) continue;
                const auto key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "model") b.model = std::string(val);
                else if (key == "n") b.n = static_cast<std::size_t>(text::parse_int(val));
                else if (key == "seed") b.seed = std::stoull(std::string(val));
                else if (key == "count") declared = static_cast<std::size_t>(text::parse_int(val));
            }
            header = true;
            continue;
        }
        b.values.push_back(text::parse_double(t));
    }
    if (!header) throw Error(ErrorKind::ParseError, "batch text lacks a header line");
    if (declared != b.values.size()) throw Error(ErrorKind::ParseError, "batch count does not match the value rows");
    return b;
}

SampleBatch sample_chain(const markov::FiniteChainSpec& spec, std::size_t n, std::size_t count, std::uint64_t seed) {
    require(n <= spec.max_steps(), "horizon exceeds the chain's explicit steps");
    double mean_total = 0.0;
    for (double m : markov::exact_means(spec, n, std::max(n, markov::kDefaultMaxSteps))) mean_total += m;
    std::vector<std::vector<std::vector<double>>> rows(spec.stored_steps());
    for (std::size_t k = 0; k < spec.stored_steps(); ++k) {
        const auto& p = spec.kernels()[k];
        for (Eigen::Index i = 0; i < p.rows(); ++i) rows[k].push_back(cumulative_of(p.row(i).transpose()));
    }
    const auto start = cumulative_of(spec.mu1());
    const std::size_t period = spec.stored_steps();
    const bool homogeneous = spec.is_homogeneous();
    SampleBatch out{std::vector<double>(count, 0.0), n, seed, spec.name().empty() ? "chain" : spec.name()};
    parallel_for(count, [&](std::size_t t) {
        CounterRng rng(seed, t);
        std::size_t x = draw_index(start, rng.uniform());
        double s = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            const std::size_t k = homogeneous ? 0 : (j - 1) % period;
            const std::size_t y = draw_index(rows[k][x], rng.uniform());
            s += spec.observables()[k](static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
            x = y;
        }
        out.values[t] = s - mean_total;
    });
    return out;
}

SampleBatch doubling_map_sum(const std::function<double(double)>& observable, std::size_t n, std::size_t count,
                             std::uint64_t seed) {
    require(static_cast<bool>(observable), "doubling map needs an observable");
    if (n > kMaxDoublingSteps)
        throw Error(ErrorKind::CapacityError, "doubling map horizon exceeds " + std::to_string(kMaxDoublingSteps));
    SampleBatch out{std::vector<double>(count, 0.0), n, seed, "doubling-map"};
    parallel_for(count, [&](std::size_t t) {
        CounterRng rng(seed, t);
        double s = 0.0;
        if (n <= kExactDoublingSteps) {
            // x_0 carries 128 random bits; T^j x_0 reads the 53 bits after position j.
            const std::uint64_t hi = rng(), lo = rng();
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint64_t w = j == 0 ? hi : (hi << j) | (lo >> (64 - j));
                s += observable(static_cast<double>(w >> 11) * 0x1.0p-53);
            }
        } else {
            // Backward construction: x_{n-1} uniform, x_{j-1} = (x_j + b_j) / 2.
            double x = rng.uniform();
            s += observable(x);
            std::uint64_t bits = 0;
            int left = 0;
            for (std::size_t j = n - 1; j-- > 0;) {
                if (left == 0) {
                    bits = rng();
                    left = 64;
                }
                x = 0.5 * (x + static_cast<double>(bits & 1u));
                bits >>= 1;
                --left;
                s += observable(x);
            }
        }
        out.values[t] = s;
    });
    return out;
}

RandomMatrixProduct::RandomMatrixProduct(std::vector<Eigen::Matrix2d> matrices, std::vector<double> probs)
    : matrices_(std::move(matrices)) {
    require(!matrices_.empty() && matrices_.size() == probs.size(), "need one probability per matrix");
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        require(probs[i] >= 0.0 && std::isfinite(probs[i]), "matrix probabilities must be nonnegative");
        require(matrices_[i].allFinite(), "matrix entries must be finite");
        const double det = matrices_[i].determinant();
        require(det != 0.0 && std::abs(det) > 1e-300, "matrices must be invertible");
        cumulative_.push_back(total += probs[i]);
    }
    require(std::abs(total - 1.0) <= 1e-12, "matrix probabilities must sum to 1");
}

SampleBatch RandomMatrixProduct::lognorm(const Eigen::Vector2d& x, std::size_t n, std::size_t count,
                                         std::uint64_t seed) const {
    const double norm0 = x.norm();
    require(norm0 > 0.0 && std::isfinite(norm0), "start vector must be nonzero");
    SampleBatch out{std::vector<double>(count, 0.0), n, seed, "random-matrix"};
    parallel_for(count, [&](std::size_t t) {
        CounterRng rng(seed, t);
        Eigen::Vector2d v = x / norm0;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            v = matrices_[draw_index(cumulative_, rng.uniform())] * v;
            const double r = v.norm();
            s += std::log(r);
            v /= r;
        }
        out.values[t] = s;
    });
    return out;
}

SampleBatch random_matrix_lognorm(const std::vector<Eigen::Matrix2d>& matrices, const std::vector<double>& probs,
                                  const Eigen::Vector2d& x, std::size_t n, std::size_t count, std::uint64_t seed) {
    return RandomMatrixProduct(matrices, probs).lognorm(x, n, count, seed);
}

SmoothingNoise::SmoothingNoise(int m) : m_(m) {
    require(m >= 2, "smoothing noise needs m >= 2");
    // Panels of width pi/2 on [0, K], then the averaged tail sin^{2m} ~ C(2m,m)/4^m.
    const double K = 2000.0 * std::numbers::pi;
    const double width = 0.5 * std::numbers::pi;
    const int panels = static_cast<int>(std::lround(K / width));
    static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                 0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                 0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    double mass = 0.0, second = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double a = width * p;
        for (int k = 0; k < 8; ++k) {
            const double x = a + 0.5 * width * (gx[k] + 1.0);
            const double w = 0.5 * width * gw[k] * sinc_power(x, m);
            mass += w;
            second += w * x * x;
        }
    }
    double avg = 1.0;
    for (int k = 1; k <= m; ++k) avg *= (m + k) / (4.0 * k);
    mass += avg * std::pow(K, 1.0 - 2.0 * m) / (2.0 * m - 1.0);
    second += avg * std::pow(K, 3.0 - 2.0 * m) / (2.0 * m - 3.0);
    lambda_ = 2.0 * mass;
    raw_variance_ = 2.0 * second / lambda_;

    envelope_scale_ = std::sqrt(2.0 * m / (2.0 * m - 1.0));
    double bound = 1.0;
    for (double x = 1e-3; x <= 60.0; x += 1e-3)
        bound = std::max(bound, sinc_power(x, m) * std::pow(1.0 + x * x / (2.0 * m), m));
    envelope_bound_ = bound * (1.0 + 1e-9);
    const double envelope_mass =
        std::sqrt(2.0 * m) * std::exp(std::lgamma(0.5) + std::lgamma(m - 0.5) - std::lgamma(static_cast<double>(m)));
    acceptance_ = lambda_ / (envelope_bound_ * envelope_mass);
    if (acceptance_ < 0.01)
        throw Error(ErrorKind::EnvelopeMisfit, "rejection efficiency below 1%", acceptance_);
}

double SmoothingNoise::support_bound() const noexcept { return 2.0 * m_ * std::sqrt(raw_variance_); }

double SmoothingNoise::density(double x) const {
    const double s = std::sqrt(raw_variance_);
    return s * sinc_power(x * s, m_) / lambda_;
}

SampleBatch SmoothingNoise::sample(std::size_t count, std::uint64_t seed) const {
    SampleBatch out{std::vector<double>(count, 0.0), 0, seed, "smoothing-noise(m=" + std::to_string(m_) + ")"};
    const double nu = 2.0 * m_ - 1.0;
    const double unit = 1.0 / std::sqrt(raw_variance_);
    parallel_for(count, [&](std::size_t t) {
        CounterRng rng(seed, t);
        for (;;) {
            // Bailey's polar method for Student-t with nu degrees of freedom.
            double u, v, w;
            do {
                u = 2.0 * rng.uniform() - 1.0;
                v = 2.0 * rng.uniform() - 1.0;
                w = u * u + v * v;
            } while (w >= 1.0 || w == 0.0);
            const double x = envelope_scale_ * u * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
            const double ratio = sinc_power(x, m_) * std::pow(1.0 + x * x / (2.0 * m_), m_);
            if (rng.uniform() * envelope_bound_ < ratio) {
                out.values[t] = x * unit;
                return;
            }
        }
    });
    return out;
}

SampleBatch sample_smoothing_noise(int m, std::size_t count, std::uint64_t seed) {
    return SmoothingNoise(m).sample(count, seed);
}

dist::CdfCurve empirical_cdf(const SampleBatch& batch) {
    require(!batch.values.empty(), "empirical CDF needs a nonempty batch");
    return dist::CdfCurve::empirical(batch.values);
}

double dkw_epsilon(std::size_t count, double alpha) {
    require(count > 0 && alpha > 0.0 && alpha < 1.0, "DKW band needs count > 0 and alpha in (0,1)");
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(count)));
}

SampleBatch sample_builtin(const std::string& model, std::size_t n, std::size_t count, std::uint64_t seed) {
    if (model == "doubling-cos") {
        auto b = doubling_map_sum([](double x) { return std::cos(2.0 * std::numbers::pi * x); }, n, count, seed);
        b.model = model;
        return b;
    }
    if (model == "random-matrix-diag") {
        Eigen::Matrix2d a, b;
        a << 2.0, 0.0, 0.0, 0.5;
        b << 1.2, 0.0, 0.0, 0.6;
        auto batch = random_matrix_lognorm({a, b}, {0.5, 0.5}, Eigen::Vector2d(1.0, 1.0), n, count, seed);
        batch.model = model;
        return batch;
    }
    auto batch = sample_chain(markov::builtin_chain(model), n, count, seed);
    batch.model = model;
    return batch;
}

std::vector<std::string> builtin_sim_names() { return {"doubling-cos", "random-matrix-diag"}; }

}  // namespace nuedge::sim
