#include "featnoise/scm.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace featnoise {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string(name) + " must be finite");
    }
}

void require_structural(double v, const char* name) {
    require_finite(v, name);
    if (v <= 0.0) {
        throw ValidationError(std::string(name) + " must be > 0");
    }
}

void require_measurement(double v, const char* name) {
    require_finite(v, name);
    if (v < 0.0) {
        throw ValidationError(std::string(name) + " must be >= 0");
    }
}

}  // namespace

void validate(const CausalParams& p) {
    require_finite(p.a, "a");
    require_finite(p.b, "b");
    require_finite(p.c, "c");
    require_structural(p.var_uz, "var_uz");
    require_structural(p.var_ux1, "var_ux1");
    require_structural(p.var_ux2, "var_ux2");
    require_structural(p.var_uy, "var_uy");
    require_measurement(p.var_eps_x1, "var_eps_x1");
    require_measurement(p.var_eps_x2, "var_eps_x2");
}

void validate(const AnticausalParams& p) {
    require_finite(p.a, "a");
    require_finite(p.b, "b");
    require_finite(p.c, "c");
    require_finite(p.d, "d");
    require_structural(p.var_uz, "var_uz");
    require_structural(p.var_uq, "var_uq");
    require_structural(p.var_uy, "var_uy");
    require_structural(p.var_ux1, "var_ux1");
    require_structural(p.var_ux2, "var_ux2");
    require_measurement(p.var_eps_x1, "var_eps_x1");
    require_measurement(p.var_eps_x2, "var_eps_x2");
}

CovarianceSummary causal_covariances(const CausalParams& p) {
    validate(p);
    CovarianceSummary s;
    s.var_x1 = p.b * p.b * p.var_uz + p.var_ux1 + p.var_eps_x1;
    s.var_x2 = p.c * p.c * p.var_uz + p.var_ux2 + p.var_eps_x2;
    s.cov_x1x2 = p.b * p.c * p.var_uz;
    s.cov_x1y = p.a * (p.b * p.b * p.var_uz + p.var_ux1);
    s.cov_x2y = p.a * p.b * p.c * p.var_uz;
    return s;
}

CovarianceSummary anticausal_covariances(const AnticausalParams& p) {
    validate(p);
    CovarianceSummary s;
    s.var_x1 = p.d * p.d * p.b * p.b * p.var_uz + p.d * p.d * p.var_uy + p.var_ux1 + p.var_eps_x1;
    s.var_x2 = p.c * p.c * p.a * p.a * p.var_uz + p.c * p.c * p.var_uq + p.var_ux2 + p.var_eps_x2;
    s.cov_x1x2 = p.a * p.b * p.c * p.d * p.var_uz;
    s.cov_x1y = p.d * (p.b * p.b * p.var_uz + p.var_uy);
    s.cov_x2y = p.a * p.b * p.c * p.var_uz;
    return s;
}

OlsEstimate ols_from_covariances(const CovarianceSummary& c) {
    const double det = c.var_x1 * c.var_x2 - c.cov_x1x2 * c.cov_x1x2;
    if (!(det > 0.0)) {
        throw SingularError("observed covariance matrix is not positive definite");
    }
    OlsEstimate est;
    est.beta1 = (c.var_x2 * c.cov_x1y - c.cov_x1x2 * c.cov_x2y) / det;
    est.beta2 = (c.var_x1 * c.cov_x2y - c.cov_x1x2 * c.cov_x1y) / det;
    return est;
}

OlsEstimate causal_analytic(const CausalParams& p) {
    validate(p);
    // Shared denominator of the clean estimator; the noisy one adds the
    // attenuation term var_eps_x1 (c^2 var_uz + var_ux2).
    const double base = p.var_uz * (p.b * p.b * p.var_ux2 + p.c * p.c * p.var_ux1) +
                        p.var_ux1 * p.var_ux2;
    const double noise_term = p.var_eps_x1 * (p.c * p.c * p.var_uz + p.var_ux2);
    OlsEstimate est;
    est.lambda = noise_term / base;
    est.beta1 = p.a / (1.0 + *est.lambda);
    est.beta2 = p.a * p.c * p.b * p.var_eps_x1 * p.var_uz / (base + noise_term);
    return est;
}

OlsEstimate causal_asymptote(const CausalParams& p) {
    validate(p);
    OlsEstimate est;
    est.beta1 = 0.0;
    est.beta2 = p.a * p.c * p.b * p.var_uz / (p.c * p.c * p.var_uz + p.var_ux2);
    return est;
}

namespace {

double anticausal_delta(const AnticausalParams& p, double ux1, double ux2) {
    const double x1_core = p.d * p.d * p.b * p.b * p.var_uz + ux1 + p.d * p.d * p.var_uy;
    const double x2_core = ux2 + p.c * p.c * p.var_uq;
    return x1_core * x2_core + (ux1 + p.d * p.d * p.var_uy) * p.c * p.c * p.a * p.a * p.var_uz;
}

// Clean anticausal estimator evaluated at effective noise variances; the
// noisy estimates are this with var_ux1 or var_ux2 shifted by the
// measurement term.
OlsEstimate anticausal_clean_at(const AnticausalParams& p, double ux1, double ux2) {
    const double zy = p.b * p.b * p.var_uz + p.var_uy;  // variance of y
    const double delta = anticausal_delta(p, ux1, ux2);
    OlsEstimate est;
    est.beta1 = p.d * (p.a * p.a * p.c * p.c * p.var_uz * p.var_uy + (p.c * p.c * p.var_uq + ux2) * zy) / delta;
    est.beta2 = p.a * p.b * p.c * p.var_uz * ux1 / delta;
    return est;
}

}  // namespace

OlsEstimate anticausal_analytic(const AnticausalParams& p) {
    validate(p);
    if (p.var_eps_x1 > 0.0 && p.var_eps_x2 > 0.0) {
        // No single attenuation factor applies; fall back to the moment route.
        return ols_from_covariances(anticausal_covariances(p));
    }
    const double delta_clean = anticausal_delta(p, p.var_ux1, p.var_ux2);
    OlsEstimate est = anticausal_clean_at(p, p.var_ux1 + p.var_eps_x1, p.var_ux2 + p.var_eps_x2);
    if (p.var_eps_x1 > 0.0) {
        est.lambda = p.var_eps_x1 *
                     (p.c * p.c * p.a * p.a * p.var_uz + p.c * p.c * p.var_uq + p.var_ux2) /
                     delta_clean;
    } else if (p.var_eps_x2 > 0.0) {
        est.lambda = p.var_eps_x2 *
                     (p.d * p.d * p.b * p.b * p.var_uz + p.var_ux1 + p.d * p.d * p.var_uy) /
                     delta_clean;
    } else {
        est.lambda = 0.0;
    }
    return est;
}

OlsEstimate anticausal_asymptote(const AnticausalParams& p, NoisyFeature f) {
    validate(p);
    const OlsEstimate clean = anticausal_clean_at(p, p.var_ux1, p.var_ux2);
    const double delta_clean = anticausal_delta(p, p.var_ux1, p.var_ux2);
    OlsEstimate est;
    if (f == NoisyFeature::kX1) {
        const double x2_var = p.c * p.c * p.a * p.a * p.var_uz + p.c * p.c * p.var_uq + p.var_ux2;
        est.beta1 = 0.0;
        est.beta2 = clean.beta2 * delta_clean / (p.var_ux1 * x2_var);
    } else {
        const double zy = p.b * p.b * p.var_uz + p.var_uy;
        const double x1_var = p.d * p.d * p.b * p.b * p.var_uz + p.var_ux1 + p.d * p.d * p.var_uy;
        const double beta1_num = p.a * p.a * p.c * p.c * p.var_uz * p.var_uy +
                                 (p.c * p.c * p.var_uq + p.var_ux2) * zy;
        est.beta1 = clean.beta1 * zy * delta_clean / (beta1_num * x1_var);
        est.beta2 = 0.0;
    }
    return est;
}

SampleBatch sample_causal(const CausalParams& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n < 1) {
        throw ValidationError("sample size must be >= 1");
    }
    Rng rng(seed);
    SampleBatch b;
    b.x1_obs.resize(n);
    b.x2_obs.resize(n);
    b.y.resize(n);
    b.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.gaussian(0.0, p.var_uz);
        const double x1 = p.b * z + rng.gaussian(0.0, p.var_ux1);
        const double x2 = p.c * z + rng.gaussian(0.0, p.var_ux2);
        const double y = p.a * x1 + rng.gaussian(0.0, p.var_uy);
        b.z[i] = z;
        b.x1_obs[i] = p.var_eps_x1 > 0.0 ? x1 + rng.gaussian(0.0, p.var_eps_x1) : x1;
        b.x2_obs[i] = p.var_eps_x2 > 0.0 ? x2 + rng.gaussian(0.0, p.var_eps_x2) : x2;
        b.y[i] = y;
    }
    return b;
}

SampleBatch sample_anticausal(const AnticausalParams& p, std::size_t n, std::uint64_t seed) {
    validate(p);
    if (n < 1) {
        throw ValidationError("sample size must be >= 1");
    }
    Rng rng(seed);
    SampleBatch b;
    b.x1_obs.resize(n);
    b.x2_obs.resize(n);
    b.y.resize(n);
    b.z.resize(n);
    b.q.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = rng.gaussian(0.0, p.var_uz);
        const double q = p.a * z + rng.gaussian(0.0, p.var_uq);
        const double y = p.b * z + rng.gaussian(0.0, p.var_uy);
        const double x2 = p.c * q + rng.gaussian(0.0, p.var_ux2);
        const double x1 = p.d * y + rng.gaussian(0.0, p.var_ux1);
        b.z[i] = z;
        b.q[i] = q;
        b.x1_obs[i] = p.var_eps_x1 > 0.0 ? x1 + rng.gaussian(0.0, p.var_eps_x1) : x1;
        b.x2_obs[i] = p.var_eps_x2 > 0.0 ? x2 + rng.gaussian(0.0, p.var_eps_x2) : x2;
        b.y[i] = y;
    }
    return b;
}

OlsEstimate fit_ols(const SampleBatch& batch) {
    const std::size_t n = batch.size();
    if (n < 3 || batch.x1_obs.size() != n || batch.x2_obs.size() != n) {
        throw ValidationError("fit_ols needs at least 3 complete rows");
    }
    const double dn = static_cast<double>(n);
    double m1 = 0.0, m2 = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m1 += batch.x1_obs[i];
        m2 += batch.x2_obs[i];
        my += batch.y[i];
    }
    m1 /= dn;
    m2 /= dn;
    my /= dn;

    // Centered normal equations; the intercept is recovered afterwards.
    double s11 = 0.0, s22 = 0.0, s12 = 0.0, s1y = 0.0, s2y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = batch.x1_obs[i] - m1;
        const double d2 = batch.x2_obs[i] - m2;
        const double dy = batch.y[i] - my;
        s11 += d1 * d1;
        s22 += d2 * d2;
        s12 += d1 * d2;
        s1y += d1 * dy;
        s2y += d2 * dy;
    }

    // A covariate whose centered variance vanishes is collinear with the
    // intercept column.
    constexpr double kVarianceFloor = 1e-18;
    if (s11 / (dn - 1.0) < kVarianceFloor || s22 / (dn - 1.0) < kVarianceFloor) {
        throw SingularError("degenerate covariate column in fit_ols");
    }
    const double det = s11 * s22 - s12 * s12;
    if (!(det > 1e-12 * s11 * s22)) {
        throw SingularError("collinear design in fit_ols");
    }

    OlsEstimate est;
    est.beta1 = (s22 * s1y - s12 * s2y) / det;
    est.beta2 = (s11 * s2y - s12 * s1y) / det;
    const double intercept = my - est.beta1 * m1 - est.beta2 * m2;

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = batch.y[i] - intercept - est.beta1 * batch.x1_obs[i] - est.beta2 * batch.x2_obs[i];
        rss += r * r;
    }
    const double sigma2 = rss / (dn - 3.0);
    est.se1 = std::sqrt(sigma2 * s22 / det);
    est.se2 = std::sqrt(sigma2 * s11 / det);
    return est;
}

std::vector<SweepRow> sweep_noise(SweepSetting setting, const SweepParams& params,
                                  const std::vector<double>& eps_grid,
                                  const std::optional<McOptions>& mc) {
    if (eps_grid.empty()) {
        throw ValidationError("eps grid must be nonempty");
    }
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        if (eps_grid[i] < 0.0 || !std::isfinite(eps_grid[i])) {
            throw ValidationError("eps grid values must be finite and >= 0");
        }
        if (i > 0 && !(eps_grid[i] > eps_grid[i - 1])) {
            throw ValidationError("eps grid must be strictly ascending");
        }
    }
    if (mc && mc->n < 3) {
        throw ValidationError("Monte Carlo sample size must be >= 3");
    }

    std::vector<SweepRow> rows;
    rows.reserve(eps_grid.size());
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        SweepRow row;
        row.eps = eps_grid[i];
        const std::uint64_t point_seed = mc ? mix64(mc->seed, i) : 0;
        if (setting == SweepSetting::kCausalX1) {
            CausalParams p = params.causal;
            p.var_eps_x1 = row.eps;
            row.analytic = causal_analytic(p);
            if (mc) {
                row.empirical = fit_ols(sample_causal(p, mc->n, point_seed));
            }
        } else {
            AnticausalParams p = params.anticausal;
            (setting == SweepSetting::kAnticausalX1 ? p.var_eps_x1 : p.var_eps_x2) = row.eps;
            row.analytic = anticausal_analytic(p);
            if (mc) {
                row.empirical = fit_ols(sample_anticausal(p, mc->n, point_seed));
            }
        }
        rows.push_back(row);
    }
    return rows;
}

const char* to_string(SweepSetting s) {
    switch (s) {
        case SweepSetting::kCausalX1: return "causal_x1";
        case SweepSetting::kAnticausalX1: return "anticausal_x1";
        case SweepSetting::kAnticausalX2: return "anticausal_x2";
    }
    return "unknown";
}

void write_sweep_csv(SweepSetting setting, const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "setting,eps,beta1_analytic,beta2_analytic,lambda,beta1_mc,beta2_mc,se1,se2\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_decimal(*v) : std::string();
    };
    for (const SweepRow& r : rows) {
        out << to_string(setting) << ',' << format_decimal(r.eps) << ','
            << format_decimal(r.analytic.beta1) << ',' << format_decimal(r.analytic.beta2) << ','
            << opt(r.analytic.lambda) << ',';
        if (r.empirical) {
            out << format_decimal(r.empirical->beta1) << ',' << format_decimal(r.empirical->beta2)
                << ',' << opt(r.empirical->se1) << ',' << opt(r.empirical->se2);
        } else {
            out << ",,,";
        }
        out << '\n';
    }
}

}  // namespace featnoise
