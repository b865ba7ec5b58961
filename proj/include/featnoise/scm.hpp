#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "featnoise/common.hpp"

namespace featnoise {

// Two-covariate linear Gaussian SCMs with optional additive measurement
// noise on the observed covariates, plus the matching closed-form OLS
// estimates and a Monte Carlo sampler to arbitrate them.

// Causal graph: z -> x1, z -> x2, x1 -> y.
//   z = u_z;  x1 = b z + u_x1;  x2 = c z + u_x2;  y = a x1 + u_y
// Observed covariates are x1 + eps_x1 and x2 + eps_x2.
struct CausalParams {
    double a = 1.0;  // effect x1 -> y
    double b = 1.0;  // confounder z -> x1
    double c = 1.0;  // confounder z -> x2
    double var_uz = 1.0;
    double var_ux1 = 1.0;
    double var_ux2 = 1.0;
    double var_uy = 1.0;
    double var_eps_x1 = 0.0;  // measurement noise on x1
    double var_eps_x2 = 0.0;  // measurement noise on x2
};

// Anticausal graph: z -> q, z -> y, q -> x2, y -> x1.
//   z = u_z;  q = a z + u_q;  y = b z + u_y;  x2 = c q + u_x2;  x1 = d y + u_x1
struct AnticausalParams {
    double a = 1.0;  // z -> q
    double b = 1.0;  // z -> y
    double c = 1.0;  // q -> x2
    double d = 1.0;  // y -> x1
    double var_uz = 1.0;
    double var_uq = 1.0;
    double var_uy = 1.0;
    double var_ux1 = 1.0;
    double var_ux2 = 1.0;
    double var_eps_x1 = 0.0;
    double var_eps_x2 = 0.0;
};

// Second moments of the observed triple (x1_obs, x2_obs, y).
struct CovarianceSummary {
    double var_x1 = 0.0;
    double var_x2 = 0.0;
    double cov_x1x2 = 0.0;
    double cov_x1y = 0.0;
    double cov_x2y = 0.0;
};

struct OlsEstimate {
    double beta1 = 0.0;
    double beta2 = 0.0;
    // Attenuation factor, populated by the analytic noisy-covariate formulas.
    std::optional<double> lambda;
    // Homoskedastic standard errors, populated by fit_ols.
    std::optional<double> se1;
    std::optional<double> se2;
};

// Monte Carlo draw from one of the SCMs. Latents are kept for diagnostics;
// q is empty for causal batches.
struct SampleBatch {
    std::vector<double> x1_obs;
    std::vector<double> x2_obs;
    std::vector<double> y;
    std::vector<double> z;
    std::vector<double> q;
    std::size_t size() const { return y.size(); }
};

void validate(const CausalParams& p);
void validate(const AnticausalParams& p);

// Observed second moments; measurement noise only inflates the own
// variances, never the cross terms.
CovarianceSummary causal_covariances(const CausalParams& p);
CovarianceSummary anticausal_covariances(const AnticausalParams& p);

// Population OLS of y on (x1, x2) from second moments:
//   beta1 = (var_x2 cov_x1y - cov_x1x2 cov_x2y) / D
//   beta2 = (var_x1 cov_x2y - cov_x1x2 cov_x1y) / D,  D = var_x1 var_x2 - cov_x1x2^2
// Throws SingularError when D <= 0.
OlsEstimate ols_from_covariances(const CovarianceSummary& c);

// Closed-form estimates under measurement noise on x1:
//   beta1 = a / (1 + lambda_c), with lambda_c proportional to var_eps_x1.
// Noise on x2 provably leaves the causal estimates unchanged, so var_eps_x2
// plays no role here. lambda is always populated (0 when var_eps_x1 = 0).
OlsEstimate causal_analytic(const CausalParams& p);

// Limit of causal_analytic as var_eps_x1 -> infinity: (0, acb var_uz / (c^2 var_uz + var_ux2)).
OlsEstimate causal_asymptote(const CausalParams& p);

// Closed-form anticausal estimates. Noise on x1 substitutes
// var_ux1 -> var_ux1 + var_eps_x1 in the clean formulas and populates
// lambda^{x1}; noise on x2 substitutes var_ux2 -> var_ux2 + var_eps_x2 and
// populates lambda^{x2}. With both noises nonzero the estimate is computed
// from the full covariances and lambda is left absent.
OlsEstimate anticausal_analytic(const AnticausalParams& p);

enum class NoisyFeature { kX1, kX2 };

// Infinite-noise limits of anticausal_analytic for the chosen feature.
OlsEstimate anticausal_asymptote(const AnticausalParams& p, NoisyFeature f);

SampleBatch sample_causal(const CausalParams& p, std::size_t n, std::uint64_t seed);
SampleBatch sample_anticausal(const AnticausalParams& p, std::size_t n, std::uint64_t seed);

// Empirical OLS with intercept on (x1_obs, x2_obs) vs y; the independent
// oracle for every analytic operation. Standard errors use the usual
// homoskedastic formula. Throws SingularError on a collinear design.
OlsEstimate fit_ols(const SampleBatch& batch);

enum class SweepSetting { kCausalX1, kAnticausalX1, kAnticausalX2 };

struct McOptions {
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

struct SweepRow {
    double eps = 0.0;
    OlsEstimate analytic;
    std::optional<OlsEstimate> empirical;
};

struct SweepParams {
    // Only one of the two is read, matching the sweep setting.
    CausalParams causal;
    AnticausalParams anticausal;
};

// One row per grid point; the swept eps replaces the corresponding
// measurement variance. Monte Carlo columns are filled when mc is given,
// with per-point seeds mix64(mc->seed, point_index).
std::vector<SweepRow> sweep_noise(SweepSetting setting, const SweepParams& params,
                                  const std::vector<double>& eps_grid,
                                  const std::optional<McOptions>& mc);

const char* to_string(SweepSetting s);

// CSV schema:
//   setting,eps,beta1_analytic,beta2_analytic,lambda,beta1_mc,beta2_mc,se1,se2
// 12 significant digits, decimal notation, empty fields where absent.
void write_sweep_csv(SweepSetting setting, const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace featnoise
