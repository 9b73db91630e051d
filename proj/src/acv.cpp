#include "tailcv/acv.hpp"

#include <cmath>

namespace tailcv {

namespace {

constexpr double kRelativeDeterminantFloor = 1e-12;
constexpr double kCollinearCorrelation = 1.0 - 1e-10;

// The Gram determinant guard shared by the coefficient and variance formulas.
bool collinear(double var_b, double var_d, double cov_bd, double det) {
    if (!(var_b > 0.0) || !(var_d > 0.0)) return true;
    if (det <= kRelativeDeterminantFloor * var_b * var_d) return true;
    return std::abs(cov_bd) / std::sqrt(var_b * var_d) >= kCollinearCorrelation;
}

}  // namespace

MomentStatistics::MomentStatistics(std::initializer_list<std::span<const double>> variables) {
    if (variables.size() == 0) throw Error("no variables supplied");
    n_ = variables.begin()->size();
    for (const auto& v : variables) {
        if (v.size() != n_) throw Error("variables must have equal length");
    }
    if (n_ < 2) throw Error("at least 2 observations are required for covariances");

    const std::size_t p = variables.size();
    std::vector<std::span<const double>> vars(variables);
    means_.resize(p);
    for (std::size_t i = 0; i < p; ++i) means_[i] = tailcv::mean(vars[i]);

    cov_.assign(p * p, 0.0);
    const double divisor = static_cast<double>(n_ - 1);
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < n_; ++t) {
                s += (vars[i][t] - means_[i]) * (vars[j][t] - means_[j]);
            }
            cov_[i * p + j] = cov_[j * p + i] = s / divisor;
        }
    }
}

double MomentStatistics::correlation(std::size_t i, std::size_t j) const {
    const double denom = std::sqrt(variance(i) * variance(j));
    if (!(denom > 0.0)) throw Error("zero variance: correlation undefined");
    return covariance(i, j) / denom;
}

double cv_coefficient(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw Error("cv_coefficient needs two equally long sequences of length >= 2");
    }
    const MomentStatistics s{a, b};
    if (!(s.variance(1) > 0.0)) throw Error("degenerate control variate");
    return s.covariance(0, 1) / s.variance(1);
}

AcvCoefficients acv_ratio_coefficients(std::span<const double> a,
                                       std::span<const double> b,
                                       std::span<const double> c,
                                       std::span<const double> d, double r_plugin) {
    if (a.size() < 3) throw Error("at least 3 coupled observations are required");
    if (!std::isfinite(r_plugin)) throw Error("plug-in ratio must be finite");

    enum { A, B, C, D };
    const MomentStatistics s{a, b, c, d};
    if (!(s.mean(C) > 0.0)) throw Error("no exceedances");

    const double var_b = s.variance(B);
    const double var_d = s.variance(D);
    const double cov_ab = s.covariance(A, B);
    const double cov_ad = s.covariance(A, D);
    const double cov_bc = s.covariance(B, C);
    const double cov_bd = s.covariance(B, D);
    const double cov_cd = s.covariance(C, D);
    const double r = r_plugin;

    AcvCoefficients out;
    out.determinant = var_b * var_d - cov_bd * cov_bd;
    if (collinear(var_b, var_d, cov_bd, out.determinant) || r == 0.0) {
        out.degenerate = true;
        return out;
    }
    out.alpha = (var_d * cov_ab - r * var_d * cov_bc + r * cov_bd * cov_cd - cov_bd * cov_ad) /
                out.determinant;
    out.beta = (cov_bd * cov_ab - r * cov_bd * cov_bc + r * var_b * cov_cd - var_b * cov_ad) /
               (r * out.determinant);
    return out;
}

AcvCoefficients acv_ratio_coefficients(const CvVariables& vars) {
    const double c_bar = mean(vars.c);
    if (!(c_bar > 0.0)) throw Error("no exceedances");
    return acv_ratio_coefficients(vars.a, vars.b_coupled(), vars.c, vars.d_coupled(),
                                  mean(vars.a) / c_bar);
}

double acv_ratio_estimate(std::span<const double> num_target,
                          std::span<const double> num_source,
                          std::span<const double> den_target,
                          std::span<const double> den_source, double alpha, double beta) {
    const std::size_t n = num_target.size();
    if (den_target.size() != n || num_source.size() < n ||
        den_source.size() != num_source.size()) {
        throw Error("inconsistent control-variate lengths");
    }
    const double num_shift = mean(num_source) - mean(num_source.first(n));
    const double den_shift = mean(den_source) - mean(den_source.first(n));
    const double numerator = mean(num_target) + alpha * num_shift;
    const double denominator = mean(den_target) + beta * den_shift;
    if (denominator == 0.0 || !std::isfinite(denominator)) {
        throw Error("degenerate denominator");
    }
    return numerator / denominator;
}

double acv_ratio_estimate(const CvVariables& vars, const AcvCoefficients& coeffs) {
    return acv_ratio_estimate(vars.a, vars.b, vars.c, vars.d, coeffs.alpha, coeffs.beta);
}

double variance_difference_plugin(const CvVariables& vars, double gamma_hat) {
    enum { A, B, C, D };
    const MomentStatistics s{vars.a, vars.b_coupled(), vars.c, vars.d_coupled()};
    const double c_bar = s.mean(C);
    if (!(c_bar > 0.0)) throw Error("no exceedances");

    const double var_b = s.variance(B);
    const double var_d = s.variance(D);
    const double cov_bd = s.covariance(B, D);
    const double det = var_b * var_d - cov_bd * cov_bd;
    if (collinear(var_b, var_d, cov_bd, det)) {
        throw Error("degenerate control variate covariance structure");
    }

    // Var(u D - w B) with u, w the coefficients of D and B in the optimal
    // correction.
    const double u = gamma_hat * s.covariance(B, C) - s.covariance(A, B);
    const double w = gamma_hat * s.covariance(C, D) - s.covariance(A, D);
    const double var_mix = u * u * var_d + w * w * var_b - 2.0 * u * w * cov_bd;

    const double n = static_cast<double>(vars.n());
    const double m = static_cast<double>(vars.m());
    const double prefactor = m / (n * (n + m));
    return prefactor / (c_bar * c_bar) * var_mix / det;
}

}  // namespace tailcv
