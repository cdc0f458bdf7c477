#include "nuedge/polyalg/hermite.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "nuedge/error.hpp"

namespace nuedge::polyalg {

namespace {

// Built once on first use; read-only afterwards.
const std::array<Polynomial, kMaxHermiteDegree + 1>& hermite_table() {
    static const auto table = [] {
        std::array<Polynomial, kMaxHermiteDegree + 1> t;
        t[0] = Polynomial::constant(1.0);
        t[1] = Polynomial::monomial(1);
        for (int k = 1; k < kMaxHermiteDegree; ++k)
            t[k + 1] = t[k].shifted_up(1) - static_cast<double>(k) * t[k - 1];
        return t;
    }();
    return table;
}

}  // namespace

const Polynomial& hermite(int k) {
    require(k >= 0, "hermite: negative degree");
    if (k > kMaxHermiteDegree)
        throw Error(ErrorKind::DegreeOverflow,
                    "hermite: degree " + std::to_string(k) + " exceeds " + std::to_string(kMaxHermiteDegree));
    return hermite_table()[static_cast<std::size_t>(k)];
}

double normal_pdf(double x) noexcept {
    return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double x) noexcept {
    return 0.5 * std::erfc(-x * (0.5 * std::numbers::sqrt2));
}

}  // namespace nuedge::polyalg
