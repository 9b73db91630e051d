#include "tailcv/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tailcv/core.hpp"

namespace tailcv {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_open_unit(double u) {
    if (!(u > 0.0 && u < 1.0)) throw Error("probability must lie in the open interval (0, 1)");
}

// Keeps copula draws strictly inside (0, 1) when exp() rounds to an endpoint.
double clamp_open(double u) {
    constexpr double lo = 0x1.0p-1000;
    constexpr double hi = 1.0 - 0x1.0p-53;
    return std::clamp(u, lo, hi);
}

}  // namespace

Marginal marginal_for_evi(double gamma, double y_m) {
    if (gamma > 0.0) return ParetoMarginal{gamma, y_m};
    if (gamma == 0.0) return StandardNormalMarginal{};
    return BetaMarginal{-1.0 / gamma};
}

double standard_normal_quantile(double u) {
    require_open_unit(u);
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (u < p_low) {
        const double q = std::sqrt(-2.0 * std::log(u));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - p_low) {
        const double q = u - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-u));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // Halley refinement.
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - u;
    const double step = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - step / (1.0 + 0.5 * x * step);
}

double marginal_quantile(double u, const Marginal& marginal) {
    require_open_unit(u);
    return std::visit(
        Overloaded{
            [u](const ParetoMarginal& p) { return p.y_m * std::pow(1.0 - u, -p.gamma); },
            [u](const StandardNormalMarginal&) { return standard_normal_quantile(u); },
            [u](const BetaMarginal& b) { return -std::expm1(std::log1p(-u) / b.shape_b); },
        },
        marginal);
}

double marginal_cdf(double y, const Marginal& marginal) {
    return std::visit(
        Overloaded{
            [y](const ParetoMarginal& p) {
                return y < p.y_m ? 0.0 : 1.0 - std::pow(y / p.y_m, -1.0 / p.gamma);
            },
            [y](const StandardNormalMarginal&) {
                return 0.5 * std::erfc(-y / std::numbers::sqrt2);
            },
            [y](const BetaMarginal& b) {
                if (y <= 0.0) return 0.0;
                if (y >= 1.0) return 1.0;
                return 1.0 - std::pow(1.0 - y, b.shape_b);
            },
        },
        marginal);
}

double marginal_evi(const Marginal& marginal) {
    return std::visit(Overloaded{
                          [](const ParetoMarginal& p) { return p.gamma; },
                          [](const StandardNormalMarginal&) { return 0.0; },
                          [](const BetaMarginal& b) { return -1.0 / b.shape_b; },
                      },
                      marginal);
}

std::string describe(const Marginal& marginal) {
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{
                   [&](const ParetoMarginal& p) {
                       os << "pareto(gamma=" << p.gamma << ", y_m=" << p.y_m << ")";
                   },
                   [&](const StandardNormalMarginal&) { os << "normal"; },
                   [&](const BetaMarginal& b) { os << "beta(1, " << b.shape_b << ")"; },
               },
               marginal);
    return os.str();
}

double positive_stable(double alpha, StreamRng& rng) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("stable index must lie in (0, 1]");
    if (alpha == 1.0) return 1.0;
    const double u = std::numbers::pi * uniform_open(rng);
    const double w = standard_exponential(rng);
    const double lead = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    return lead * std::pow(std::sin((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
}

std::vector<CopulaPair> sample_gumbel_copula(double theta, std::size_t count, StreamRng& rng) {
    if (!(theta >= 1.0) || !std::isfinite(theta)) {
        throw Error("Gumbel copula parameter theta must be >= 1");
    }
    const double alpha = 1.0 / theta;
    std::vector<CopulaPair> out(count);
    for (auto& pair : out) {
        const double s = positive_stable(alpha, rng);
        const double e1 = standard_exponential(rng);
        const double e2 = standard_exponential(rng);
        pair.u1 = clamp_open(std::exp(-std::pow(e1 / s, alpha)));
        pair.u2 = clamp_open(std::exp(-std::pow(e2 / s, alpha)));
    }
    return out;
}

double gumbel_tail_dependence(double theta) { return 2.0 - std::pow(2.0, 1.0 / theta); }

}  // namespace tailcv
