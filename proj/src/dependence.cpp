#include "tailcv/dependence.hpp"

#include <algorithm>
#include <cmath>

#include "tailcv/acv.hpp"
#include "tailcv/estimators.hpp"

namespace tailcv {

double tail_dependence(std::span<const double> paired_target,
                       std::span<const double> paired_source, std::size_t k) {
    if (paired_target.size() != paired_source.size()) {
        throw Error("paired target and source must have equal length");
    }
    const double u_t = threshold_at(paired_target, k);
    const double u_s = threshold_at(paired_source, k);
    std::size_t joint = 0;
    for (std::size_t i = 0; i < paired_target.size(); ++i) {
        if (paired_target[i] > u_t && paired_source[i] > u_s) ++joint;
    }
    return static_cast<double>(joint) / static_cast<double>(k);
}

CvCorrelations cv_correlations(const CvVariables& vars) {
    const MomentStatistics s{vars.a, vars.b_coupled(), vars.c, vars.d_coupled()};
    return {s.correlation(0, 1), s.correlation(2, 3)};
}

ExtremalCoefficients extremal_coefficients(const CvVariables& vars, double gamma_t_hat,
                                           double gamma_s_hat) {
    if (!(gamma_t_hat > 0.0) || !(gamma_s_hat > 0.0)) {
        throw Error("EVI estimates used for scaling must be positive");
    }
    ExtremalCoefficients out;
    double sum_ad = 0.0;
    double sum_ab = 0.0;
    for (std::size_t i = 0; i < vars.n(); ++i) {
        if (vars.c[i] > 0.0 && vars.d[i] > 0.0) {
            const double z_t = vars.a[i] / gamma_t_hat;
            const double z_s = vars.b[i] / gamma_s_hat;
            sum_ad += z_t - 1.0;
            sum_ab += (z_t - 1.0) * z_s;
            ++out.joint_exceedances;
        }
    }
    if (out.joint_exceedances < 2) throw Error("tail dependence too weak to estimate");
    out.c_ad = sum_ad / static_cast<double>(out.joint_exceedances);
    out.c_ab = sum_ab / static_cast<double>(out.joint_exceedances);
    return out;
}

double asymptotic_rvr_closed_form(double lambda, double p, double c_ab, double c_ad,
                                  std::size_t n, std::size_t m) {
    if (!(p > 0.0 && p < 1.0)) throw Error("exceedance probability must lie in (0, 1)");
    if (n == 0) throw Error("n must be positive");
    const double lam = std::clamp(lambda, 0.0, 1.0);
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    // c' S^-1 c for the (B, D) control pair, with Var(B) = p(2-p), Cov(B, D) = p(1-p) and
    // Var(D) = p(1-p) in units of the source EVI; the cross term carries the usual factor 2.
    const double bracket = c_ab * c_ab + c_ad * c_ad * (2.0 - p) / (1.0 - p) - 2.0 * c_ab * c_ad;
    // Absolute reduction lambda^2 m/(n(n+m)) bracket/p, relative to gamma^2/(n p).
    const double absolute = lam * lam * md / (nd * (nd + md)) * bracket / p;
    return absolute * nd * p;
}

namespace {

struct ScaledInputs {
    CvVariables vars;
    double gamma_t = 0.0;
    double gamma_s = 0.0;
};

ScaledInputs scaled_inputs(const SemiSupervisedDataset& dataset, std::size_t k,
                           std::size_t k_source, std::optional<double> gamma_t_hat,
                           std::optional<double> gamma_s_hat) {
    ScaledInputs in{build_cv_variables(dataset, k, k_source), 0.0, 0.0};
    in.gamma_t = gamma_t_hat ? *gamma_t_hat : hill(dataset.paired_target(), k).value;
    in.gamma_s = gamma_s_hat ? *gamma_s_hat : hill(dataset.paired_source(), k_source).value;
    if (!(in.gamma_s > 0.0)) {
        throw Error("asymptotic RVR requires a heavy-tailed source (positive source EVI)");
    }
    return in;
}

}  // namespace

double asymptotic_rvr(const SemiSupervisedDataset& dataset, std::size_t k,
                      std::size_t k_source, std::optional<double> gamma_t_hat,
                      std::optional<double> gamma_s_hat) {
    const auto in = scaled_inputs(dataset, k, k_source, gamma_t_hat, gamma_s_hat);
    const auto coeffs = extremal_coefficients(in.vars, in.gamma_t, in.gamma_s);
    const double lambda = tail_dependence(dataset.paired_target(), dataset.paired_source(), k);
    const double p = static_cast<double>(k) / static_cast<double>(dataset.n());
    return asymptotic_rvr_closed_form(lambda, p, coeffs.c_ab, coeffs.c_ad, dataset.n(),
                                      dataset.m());
}

DependenceReport dependence_report(const SemiSupervisedDataset& dataset, std::size_t k,
                                   std::size_t k_source, std::optional<double> gamma_t_hat,
                                   std::optional<double> gamma_s_hat) {
    const CvVariables vars = build_cv_variables(dataset, k, k_source);
    DependenceReport r;
    r.lambda_hat = tail_dependence(dataset.paired_target(), dataset.paired_source(), k);
    r.lambda_clipped = r.lambda_hat > 1.0;
    const auto corr = cv_correlations(vars);
    r.corr_ab = corr.corr_ab;
    r.corr_cd = corr.corr_cd;
    r.p_hat = static_cast<double>(k) / static_cast<double>(dataset.n());
    for (std::size_t i = 0; i < vars.n(); ++i) {
        r.target_exceedances += vars.c[i] > 0.0 ? 1 : 0;
        r.joint_exceedances += (vars.c[i] > 0.0 && vars.d[i] > 0.0) ? 1 : 0;
    }
    try {
        const double g_t = gamma_t_hat ? *gamma_t_hat : hill(dataset.paired_target(), k).value;
        const double g_s =
            gamma_s_hat ? *gamma_s_hat : hill(dataset.paired_source(), k_source).value;
        const auto coeffs = extremal_coefficients(vars, g_t, g_s);
        r.c_ad_hat = coeffs.c_ad;
        r.c_ab_hat = coeffs.c_ab;
    } catch (const Error&) {
        // Coefficients stay empty; the remaining diagnostics are still valid.
    }
    return r;
}

}  // namespace tailcv
