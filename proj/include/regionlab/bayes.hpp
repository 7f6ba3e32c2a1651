#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regionlab/error.hpp"
#include "regionlab/parallel.hpp"
#include "regionlab/rng.hpp"
#include "regionlab/stats.hpp"

namespace regionlab {

// ---------------------------------------------------------------------------
// Densities
// ---------------------------------------------------------------------------

/// Log-density of the Laplace distribution with location mu and scale b
/// (variance 2 b^2): log(1/(2b)) - |y - mu| / b.
inline double laplace_logpdf(double y, double location, double scale) {
    require(scale > 0.0, "Laplace scale must be positive, got ", scale);
    return -std::log(2.0 * scale) - std::abs(y - location) / scale;
}

namespace detail {

// Sampler-internal densities: out-of-support returns -inf instead of
// throwing, so a wild Metropolis proposal is rejected rather than fatal.
inline double safe_laplace_logpdf(double y, double location, double scale) {
    if (!(scale > 1e-300) || !std::isfinite(scale))
        return -std::numeric_limits<double>::infinity();
    return -std::log(2.0 * scale) - std::abs(y - location) / scale;
}

inline double safe_normal_logpdf(double y, double mean, double sd) {
    if (!(sd > 1e-300) || !std::isfinite(sd))
        return -std::numeric_limits<double>::infinity();
    const double z = (y - mean) / sd;
    return -0.918938533204672742 - std::log(sd) - 0.5 * z * z; // -log(sqrt(2*pi)) - ...
}

inline double half_cauchy_logpdf(double y, double scale) {
    if (y <= 0.0 || !std::isfinite(y))
        return -std::numeric_limits<double>::infinity();
    const double z = y / scale;
    return std::log(2.0 / (3.14159265358979323846 * scale)) - std::log1p(z * z);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Data
// ---------------------------------------------------------------------------

/// Province-level regression data: income on education with a region
/// index per province. The education column is centered within each
/// region, so the intercept is the regional income level at regional mean
/// education.
struct RegressionData {
    std::vector<double> x;          // mean years of education per province
    std::vector<double> y;          // mean monthly income per province
    std::vector<int> region;        // region index per province, 0-based
    int n_regions = 0;
    std::vector<std::vector<std::size_t>> members; // provinces per region
    std::vector<double> region_x_mean;
    std::vector<double> x_centered; // x minus its region mean
};

inline RegressionData make_regression_data(std::vector<double> x, std::vector<double> y,
                                           std::vector<int> region, int n_regions) {
    require(n_regions >= 1, "need at least one region");
    require(x.size() == y.size() && x.size() == region.size(), "x/y/region size mismatch");
    RegressionData data;
    data.x = std::move(x);
    data.y = std::move(y);
    data.region = std::move(region);
    data.n_regions = n_regions;
    data.members.resize(static_cast<std::size_t>(n_regions));
    for (std::size_t i = 0; i < data.region.size(); ++i) {
        require(data.region[i] >= 0 && data.region[i] < n_regions, "region index ",
                data.region[i], " out of range");
        data.members[static_cast<std::size_t>(data.region[i])].push_back(i);
    }
    data.region_x_mean.resize(static_cast<std::size_t>(n_regions));
    data.x_centered.resize(data.x.size());
    for (int j = 0; j < n_regions; ++j) {
        const auto& m = data.members[static_cast<std::size_t>(j)];
        require(m.size() >= 2, "region ", j, " has ", m.size(), " provinces; need at least 2");
        double sum = 0.0;
        for (std::size_t i : m)
            sum += data.x[i];
        const double xbar = sum / static_cast<double>(m.size());
        data.region_x_mean[static_cast<std::size_t>(j)] = xbar;
        for (std::size_t i : m)
            data.x_centered[i] = data.x[i] - xbar;
    }
    return data;
}

// ---------------------------------------------------------------------------
// Model variants
// ---------------------------------------------------------------------------

enum class ModelVariant {
    HierDiffSlopes,      // per-region slopes, partially pooled through national level
    HierCommonSlope,     // per-region intercepts, one national slope
    IndependentPerRegion, // per-region parameters, no pooling
    PooledSingle,         // one intercept/slope/scale for the whole country
};

inline const char* variant_name(ModelVariant v) {
    switch (v) {
    case ModelVariant::HierDiffSlopes: return "diff-slopes";
    case ModelVariant::HierCommonSlope: return "common-slope";
    case ModelVariant::IndependentPerRegion: return "independent";
    case ModelVariant::PooledSingle: return "pooled";
    }
    return "unknown";
}

inline ModelVariant parse_variant(const std::string& name) {
    if (name == "diff-slopes")
        return ModelVariant::HierDiffSlopes;
    if (name == "common-slope")
        return ModelVariant::HierCommonSlope;
    if (name == "independent")
        return ModelVariant::IndependentPerRegion;
    if (name == "pooled")
        return ModelVariant::PooledSingle;
    fail("unknown model variant '", name,
         "'; expected diff-slopes, common-slope, independent, or pooled");
}

struct FitConfig {
    int n_chains = 4;
    int n_warmup = 2000;
    int n_draws = 2000;
    std::uint64_t seed = 0;
};

/// Labeled posterior draws for one model variant, one matrix per chain
/// (rows = retained draws, columns = parameters, natural scale).
struct PosteriorDraws {
    ModelVariant variant = ModelVariant::HierCommonSlope;
    int n_regions = 0;
    std::vector<std::string> names;
    std::vector<Eigen::MatrixXd> chains;
    std::vector<double> rhat; // split R-hat per parameter
    std::vector<double> ess;  // effective sample size per parameter
    bool converged = true;    // false if any split R-hat exceeds 1.05

    // Column of the intercept/slope/scale governing each region's likelihood;
    // shared parameters map several regions to the same column.
    std::vector<std::size_t> alpha_col, beta_col, sigma_col;

    std::size_t column(const std::string& name) const {
        for (std::size_t c = 0; c < names.size(); ++c)
            if (names[c] == name)
                return c;
        fail("no posterior parameter named '", name, "'");
    }

    /// All chains' draws of one parameter, chain-major order.
    std::vector<double> flat(std::size_t col) const {
        std::vector<double> out;
        for (const Eigen::MatrixXd& chain : chains)
            for (Eigen::Index r = 0; r < chain.rows(); ++r)
                out.push_back(chain(r, static_cast<Eigen::Index>(col)));
        return out;
    }
};

// ---------------------------------------------------------------------------
// Sampler internals
// ---------------------------------------------------------------------------

namespace detail {

/// Flat description of a sampleable model: a parameter vector on the
/// sampling scale (log for positive parameters) plus index maps tying
/// regions to the intercept/slope/scale governing them.
struct ModelLayout {
    std::vector<std::string> names;
    std::vector<char> log_scale;            // parameter sampled as log(value)
    std::vector<std::vector<int>> regions;  // regions whose likelihood uses the parameter
    std::vector<double> init_center;        // sampling scale
    std::vector<double> init_spread;        // chain-jitter sd, sampling scale
    std::vector<double> init_step;          // initial proposal sd

    std::vector<std::size_t> alpha_col, beta_col, sigma_col; // per region
    // -1 when the variant has no such national-level parameter.
    int mu_alpha = -1, tau_alpha = -1, mu_beta = -1, tau_beta = -1;

    // Fixed weakly informative prior scales, derived from the data.
    double y_mean = 0.0, y_sd = 1.0, x_sd = 1.0;
    double alpha_prior_sd = 1.0, beta_prior_sd = 1.0, hc_scale = 1.0;
    bool hier_alpha = false, hier_beta = false;
};

inline ModelLayout build_layout(ModelVariant variant, const RegressionData& data) {
    ModelLayout layout;
    const std::size_t J = static_cast<std::size_t>(data.n_regions);

    layout.y_mean = mean(data.y);
    layout.y_sd = sample_sd(data.y);
    layout.x_sd = sample_sd(data.x_centered);
    require(layout.y_sd > 0.0, "income is constant; regression is degenerate");
    require(layout.x_sd > 0.0, "education is constant within every region; slope unidentified");
    layout.alpha_prior_sd = 10.0 * layout.y_sd;
    layout.beta_prior_sd = 10.0 * layout.y_sd / layout.x_sd;
    layout.hc_scale = 5.0 * layout.y_sd;

    const double beta_scale = layout.y_sd / layout.x_sd;
    const double log_sigma0 = std::log(std::max(layout.y_sd * 0.5, 1e-12));

    auto add = [&](const std::string& name, bool log_scale, std::vector<int> regions,
                   double center, double spread, double step) {
        layout.names.push_back(name);
        layout.log_scale.push_back(log_scale ? 1 : 0);
        layout.regions.push_back(std::move(regions));
        layout.init_center.push_back(center);
        layout.init_spread.push_back(spread);
        layout.init_step.push_back(step);
        return layout.names.size() - 1;
    };
    auto all_regions = [&] {
        std::vector<int> r(J);
        std::iota(r.begin(), r.end(), 0);
        return r;
    };
    auto region_median = [&](std::size_t j) {
        std::vector<double> v;
        for (std::size_t i : data.members[j])
            v.push_back(data.y[i]);
        return median(v);
    };

    layout.hier_alpha =
        variant == ModelVariant::HierDiffSlopes || variant == ModelVariant::HierCommonSlope;
    layout.hier_beta = variant == ModelVariant::HierDiffSlopes;
    const bool pooled = variant == ModelVariant::PooledSingle;

    if (pooled) {
        const std::size_t a = add("alpha", false, all_regions(), layout.y_mean,
                                  0.3 * layout.y_sd, layout.y_sd / std::sqrt(double(data.y.size())));
        layout.alpha_col.assign(J, a);
    } else {
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t a =
                add("alpha[" + std::to_string(j + 1) + "]", false, {static_cast<int>(j)},
                    region_median(j), 0.3 * layout.y_sd,
                    layout.y_sd / std::sqrt(double(data.members[j].size())));
            layout.alpha_col.push_back(a);
        }
    }

    if (variant == ModelVariant::HierDiffSlopes || variant == ModelVariant::IndependentPerRegion) {
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t b =
                add("beta[" + std::to_string(j + 1) + "]", false, {static_cast<int>(j)}, 0.0,
                    0.3 * beta_scale, beta_scale / std::sqrt(double(data.members[j].size())));
            layout.beta_col.push_back(b);
        }
    } else {
        const std::size_t b = add("beta", false, all_regions(), 0.0, 0.3 * beta_scale,
                                  beta_scale / std::sqrt(double(data.y.size())));
        layout.beta_col.assign(J, b);
    }

    if (pooled) {
        const std::size_t s = add("sigma", true, all_regions(), log_sigma0, 0.2, 0.3);
        layout.sigma_col.assign(J, s);
    } else {
        for (std::size_t j = 0; j < J; ++j) {
            const std::size_t s = add("sigma[" + std::to_string(j + 1) + "]", true,
                                      {static_cast<int>(j)}, log_sigma0, 0.2, 0.3);
            layout.sigma_col.push_back(s);
        }
    }

    if (layout.hier_alpha) {
        layout.mu_alpha = static_cast<int>(
            add("mu_alpha", false, {}, layout.y_mean, 0.3 * layout.y_sd,
                layout.y_sd / std::sqrt(double(J))));
        layout.tau_alpha =
            static_cast<int>(add("tau_alpha", true, {}, std::log(layout.y_sd), 0.2, 0.3));
    }
    if (layout.hier_beta) {
        layout.mu_beta = static_cast<int>(
            add("mu_beta", false, {}, 0.0, 0.3 * beta_scale, beta_scale / std::sqrt(double(J))));
        layout.tau_beta =
            static_cast<int>(add("tau_beta", true, {}, std::log(beta_scale), 0.2, 0.3));
    }
    return layout;
}

/// Log-likelihood of one region given the sampling-scale parameter vector.
inline double region_loglik(const ModelLayout& layout, const RegressionData& data,
                            const std::vector<double>& theta, int j) {
    const std::size_t ju = static_cast<std::size_t>(j);
    const double alpha = theta[layout.alpha_col[ju]];
    const double beta = theta[layout.beta_col[ju]];
    const double sigma = std::exp(theta[layout.sigma_col[ju]]);
    if (!(sigma > 1e-300) || !std::isfinite(sigma))
        return -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    for (std::size_t i : data.members[ju])
        ll += -std::abs(data.y[i] - alpha - beta * data.x_centered[i]);
    return ll / sigma -
           static_cast<double>(data.members[ju].size()) * std::log(2.0 * sigma);
}

/// Joint log-prior, including the log-scale Jacobian for positive
/// parameters. Distinct parameters are visited once each via their
/// first-region ownership; shared parameters appear once in the layout by
/// construction.
inline double log_prior(const ModelLayout& layout, const std::vector<double>& theta) {
    double lp = 0.0;
    // Intercepts
    double mu_a = layout.y_mean, tau_a = layout.alpha_prior_sd;
    if (layout.hier_alpha) {
        mu_a = theta[static_cast<std::size_t>(layout.mu_alpha)];
        tau_a = std::exp(theta[static_cast<std::size_t>(layout.tau_alpha)]);
    }
    double mu_b = 0.0, tau_b = layout.beta_prior_sd;
    if (layout.hier_beta) {
        mu_b = theta[static_cast<std::size_t>(layout.mu_beta)];
        tau_b = std::exp(theta[static_cast<std::size_t>(layout.tau_beta)]);
    }
    std::size_t prev_alpha = static_cast<std::size_t>(-1);
    std::size_t prev_beta = static_cast<std::size_t>(-1);
    std::size_t prev_sigma = static_cast<std::size_t>(-1);
    for (std::size_t j = 0; j < layout.alpha_col.size(); ++j) {
        if (layout.alpha_col[j] != prev_alpha) {
            prev_alpha = layout.alpha_col[j];
            lp += safe_normal_logpdf(theta[prev_alpha], mu_a, tau_a);
        }
        if (layout.beta_col[j] != prev_beta) {
            prev_beta = layout.beta_col[j];
            lp += safe_normal_logpdf(theta[prev_beta], mu_b, tau_b);
        }
        if (layout.sigma_col[j] != prev_sigma) {
            prev_sigma = layout.sigma_col[j];
            lp += half_cauchy_logpdf(std::exp(theta[prev_sigma]), layout.hc_scale) +
                  theta[prev_sigma];
        }
    }
    if (layout.hier_alpha) {
        lp += safe_normal_logpdf(mu_a, layout.y_mean, layout.alpha_prior_sd);
        const double lt = theta[static_cast<std::size_t>(layout.tau_alpha)];
        lp += half_cauchy_logpdf(std::exp(lt), layout.hc_scale) + lt;
    }
    if (layout.hier_beta) {
        lp += safe_normal_logpdf(mu_b, 0.0, layout.beta_prior_sd);
        const double lt = theta[static_cast<std::size_t>(layout.tau_beta)];
        lp += half_cauchy_logpdf(std::exp(lt), layout.hc_scale) + lt;
    }
    return lp;
}

/// One chain of component-wise random-walk Metropolis with batched
/// step-size adaptation during warmup targeting 0.44 acceptance.
inline Eigen::MatrixXd run_chain(const ModelLayout& layout, const RegressionData& data,
                                 const FitConfig& config, std::uint64_t chain_index) {
    Rng rng(config.seed, chain_index);
    const std::size_t P = layout.names.size();
    std::vector<double> theta(P);
    for (std::size_t p = 0; p < P; ++p)
        theta[p] = layout.init_center[p] + layout.init_spread[p] * rng.normal();

    std::vector<double> region_ll(static_cast<std::size_t>(data.n_regions));
    for (int j = 0; j < data.n_regions; ++j)
        region_ll[static_cast<std::size_t>(j)] = region_loglik(layout, data, theta, j);
    double prior = log_prior(layout, theta);

    std::vector<double> log_step(P);
    for (std::size_t p = 0; p < P; ++p)
        log_step[p] = std::log(layout.init_step[p]);
    std::vector<int> accepts(P, 0);
    constexpr int kBatch = 50;
    int batch_number = 0;

    const int total = config.n_warmup + config.n_draws;
    Eigen::MatrixXd draws(config.n_draws, static_cast<Eigen::Index>(P));
    std::vector<double> new_ll;
    for (int iter = 0; iter < total; ++iter) {
        for (std::size_t p = 0; p < P; ++p) {
            const double old_value = theta[p];
            theta[p] = old_value + std::exp(log_step[p]) * rng.normal();
            const auto& affected = layout.regions[p];
            new_ll.assign(affected.size(), 0.0);
            double delta = 0.0;
            for (std::size_t a = 0; a < affected.size(); ++a) {
                new_ll[a] = region_loglik(layout, data, theta, affected[a]);
                delta += new_ll[a] - region_ll[static_cast<std::size_t>(affected[a])];
            }
            const double new_prior = log_prior(layout, theta);
            delta += new_prior - prior;
            // NaN delta compares false and rejects; +inf (escape from a
            // degenerate state) accepts.
            if (std::log(rng.uniform_open()) < delta) {
                prior = new_prior;
                for (std::size_t a = 0; a < affected.size(); ++a)
                    region_ll[static_cast<std::size_t>(affected[a])] = new_ll[a];
                ++accepts[p];
            } else {
                theta[p] = old_value;
            }
        }
        if (iter < config.n_warmup && (iter + 1) % kBatch == 0) {
            ++batch_number;
            const double delta = std::min(0.5, 1.0 / std::sqrt(double(batch_number)));
            for (std::size_t p = 0; p < P; ++p) {
                log_step[p] += (accepts[p] > static_cast<int>(0.44 * kBatch)) ? delta : -delta;
                accepts[p] = 0;
            }
        }
        if (iter >= config.n_warmup) {
            const Eigen::Index row = iter - config.n_warmup;
            for (std::size_t p = 0; p < P; ++p)
                draws(row, static_cast<Eigen::Index>(p)) =
                    layout.log_scale[p] ? std::exp(theta[p]) : theta[p];
        }
    }
    return draws;
}

/// Split R-hat and effective sample size from per-chain draws of one
/// parameter. Chains are split in half; ESS uses the initial positive
/// sequence of paired autocorrelations.
inline std::pair<double, double> rhat_ess(const std::vector<Eigen::MatrixXd>& chains,
                                          std::size_t col) {
    std::vector<std::vector<double>> seqs;
    for (const Eigen::MatrixXd& chain : chains) {
        const Eigen::Index N = chain.rows();
        const Eigen::Index L = N / 2;
        if (L < 2)
            continue;
        std::vector<double> first, second;
        for (Eigen::Index r = 0; r < L; ++r)
            first.push_back(chain(r, static_cast<Eigen::Index>(col)));
        for (Eigen::Index r = N - L; r < N; ++r)
            second.push_back(chain(r, static_cast<Eigen::Index>(col)));
        seqs.push_back(std::move(first));
        seqs.push_back(std::move(second));
    }
    const std::size_t M = seqs.size();
    if (M < 2)
        return {1.0, chains.empty() ? 0.0 : double(chains.size() * chains[0].rows())};
    const std::size_t L = seqs[0].size();

    std::vector<double> seq_mean(M), seq_var(M);
    for (std::size_t m = 0; m < M; ++m) {
        seq_mean[m] = mean(seqs[m]);
        double ss = 0.0;
        for (double v : seqs[m])
            ss += (v - seq_mean[m]) * (v - seq_mean[m]);
        seq_var[m] = ss / static_cast<double>(L - 1);
    }
    const double grand = mean(seq_mean);
    double B = 0.0;
    for (double m : seq_mean)
        B += (m - grand) * (m - grand);
    B *= static_cast<double>(L) / static_cast<double>(M - 1);
    const double W = mean(seq_var);
    const double var_plus =
        (static_cast<double>(L - 1) / static_cast<double>(L)) * W + B / static_cast<double>(L);

    const double total = static_cast<double>(M * L);
    if (W == 0.0 && B == 0.0)
        return {1.0, total}; // constant parameter
    if (W == 0.0)
        return {std::numeric_limits<double>::infinity(), 0.0}; // frozen chains, distinct values
    const double rhat = std::sqrt(var_plus / W);

    // Mean autocovariance across sequences at each lag (biased 1/L form).
    auto mean_autocov = [&](std::size_t t) {
        double acc = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            double c = 0.0;
            for (std::size_t i = 0; i + t < L; ++i)
                c += (seqs[m][i] - seq_mean[m]) * (seqs[m][i + t] - seq_mean[m]);
            acc += c / static_cast<double>(L);
        }
        return acc / static_cast<double>(M);
    };
    std::vector<double> rho;
    for (std::size_t t = 0; t + 1 < L; ++t)
        rho.push_back(1.0 - (W - mean_autocov(t)) / var_plus);

    double tau = -1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; 2 * k + 1 < rho.size(); ++k) {
        double pair = rho[2 * k] + rho[2 * k + 1];
        if (pair <= 0.0)
            break;
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        tau += 2.0 * pair;
    }
    tau = std::max(tau, 1.0 / 10.0);
    return {rhat, std::min(total, total / tau)};
}

} // namespace detail

// ---------------------------------------------------------------------------
// Fitting
// ---------------------------------------------------------------------------

/// Fits one model variant by component-wise adaptive random-walk
/// Metropolis (the Laplace likelihood is non-smooth at its median, so
/// gradient samplers are out). Chains run independently, each seeded from
/// (config.seed, chain index), so results do not depend on the thread
/// count. Non-convergence (any split R-hat above 1.05) flags the result
/// but still returns the draws.
inline PosteriorDraws fit(ModelVariant variant, const RegressionData& data,
                          const FitConfig& config = {}) {
    require(config.n_chains >= 1, "need at least one chain");
    require(config.n_warmup >= 0, "negative warmup length");
    require(config.n_draws >= 1, "need at least one retained draw");
    const detail::ModelLayout layout = detail::build_layout(variant, data);

    PosteriorDraws out;
    out.variant = variant;
    out.n_regions = data.n_regions;
    out.names = layout.names;
    out.alpha_col = layout.alpha_col;
    out.beta_col = layout.beta_col;
    out.sigma_col = layout.sigma_col;
    out.chains.resize(static_cast<std::size_t>(config.n_chains));
    parallel_for(static_cast<std::size_t>(config.n_chains), [&](std::size_t c) {
        out.chains[c] = detail::run_chain(layout, data, config, c);
    });

    for (std::size_t p = 0; p < out.names.size(); ++p) {
        const auto [rhat, ess] = detail::rhat_ess(out.chains, p);
        out.rhat.push_back(rhat);
        out.ess.push_back(ess);
        if (!(rhat < 1.05))
            out.converged = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Posterior summaries
// ---------------------------------------------------------------------------

struct CredibleInterval {
    double low = 0.0;
    double mean = 0.0;
    double high = 0.0;
};

/// Equal-tailed credible interval with linear-interpolation quantiles.
inline CredibleInterval credible_interval(const std::vector<double>& draws, double level = 0.95) {
    require(draws.size() >= 100, "need at least 100 draws for an interval, got ", draws.size());
    require(level > 0.0 && level < 1.0, "level must lie in (0,1), got ", level);
    std::vector<double> sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    const double tail = (1.0 - level) / 2.0;
    CredibleInterval ci;
    ci.low = quantile_sorted(sorted, tail);
    ci.high = quantile_sorted(sorted, 1.0 - tail);
    ci.mean = mean(draws);
    return ci;
}

struct WaicResult {
    double waic = 0.0;   // deviance scale: -2 (lppd - p_waic)
    double lppd = 0.0;   // log pointwise predictive density
    double p_waic = 0.0; // effective number of parameters
    std::vector<double> pointwise; // per-observation -2 (lppd_i - p_waic_i)
};

/// Widely applicable information criterion from the pointwise
/// log-likelihood over all retained draws:
///   lppd   = sum_i log mean_s exp(logL_is)   (stable log-sum-exp)
///   p_waic = sum_i var_s logL_is
inline WaicResult waic(const PosteriorDraws& draws, const RegressionData& data) {
    require(!draws.chains.empty() && draws.chains[0].rows() >= 1, "no posterior draws");
    require(draws.n_regions == data.n_regions, "draws/data region count mismatch");
    std::size_t S = 0;
    for (const Eigen::MatrixXd& chain : draws.chains)
        S += static_cast<std::size_t>(chain.rows());

    WaicResult result;
    std::vector<double> loglik(S);
    for (std::size_t i = 0; i < data.y.size(); ++i) {
        const std::size_t j = static_cast<std::size_t>(data.region[i]);
        const Eigen::Index ca = static_cast<Eigen::Index>(draws.alpha_col[j]);
        const Eigen::Index cb = static_cast<Eigen::Index>(draws.beta_col[j]);
        const Eigen::Index cs = static_cast<Eigen::Index>(draws.sigma_col[j]);
        std::size_t s = 0;
        for (const Eigen::MatrixXd& chain : draws.chains)
            for (Eigen::Index r = 0; r < chain.rows(); ++r, ++s)
                loglik[s] = detail::safe_laplace_logpdf(
                    data.y[i], chain(r, ca) + chain(r, cb) * data.x_centered[i], chain(r, cs));

        const double lppd_i = log_sum_exp(loglik) - std::log(static_cast<double>(S));
        double p_i = 0.0;
        if (S > 1) {
            const double m = mean(loglik);
            for (double v : loglik)
                p_i += (v - m) * (v - m);
            p_i /= static_cast<double>(S - 1);
        }
        result.lppd += lppd_i;
        result.p_waic += p_i;
        result.pointwise.push_back(-2.0 * (lppd_i - p_i));
    }
    result.waic = -2.0 * (result.lppd - result.p_waic);
    return result;
}

} // namespace regionlab
