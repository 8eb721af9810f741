#ifndef CENTROPY_ENTROPY_HPP
#define CENTROPY_ENTROPY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "centropy/kernel.hpp"
#include "centropy/types.hpp"

namespace centropy {

enum class Estimator { Binning, KNN };
enum class Space { Original, Projected };

struct EstimatorConfig {
    Estimator kind = Estimator::KNN;
    int bins = 30;                  // Binning
    int k = 3;                      // KNN
    std::uint64_t jitter_seed = 0;  // KNN duplicate handling
};

/// Controls the kernel-embedding pipeline. When sigma is unset the width is
/// width_factor times the median pairwise distance; the factor is large so the
/// kernel operates in its near-linear regime, where the informative
/// eigen-dimensions separate cleanly from curvature terms.
struct KernelEmbedConfig {
    KernelKind kind = KernelKind::Gaussian;
    std::optional<double> sigma;
    double width_factor = 100.0;
    Eigen::Index max_gram_samples = 1200;  // Gram/EVD cost cap; subsample above this
    std::uint64_t subsample_seed = 7;
    // Signal/curvature split of the eigen-dimension variance spectrum.
    double truncation_floor = 1e-4;
    double truncation_guard = 1e-9;
};

struct EntropyEstimate {
    double value = 0.0;  // nats; always the sum of per_dimension
    Estimator estimator = Estimator::KNN;
    Space space = Space::Original;
    std::vector<double> per_dimension;
    EstimatorConfig config;
    // Projected-space diagnostics.
    Eigen::Index retained_rank = 0;
    double eigenvalue_mass = 0.0;  // retained / total eigenvalue sum
    double dim_correlation = 0.0;           // over all usable eigen-dimensions
    double retained_dim_correlation = 0.0;  // over the dimensions actually summed
    double sigma_used = 0.0;
};

struct GaussianSpec {
    Eigen::Index dimension = 1;
    Matrix covariance;
    Vector mean;
};

/// Equal-width histogram entropy over [min, max]; constant input gives 0.
inline double binned_entropy_1d(const Vector& x, int bins) {
    if (bins < 2)
        throw ParameterError("binned_entropy_1d: need at least 2 bins");
    if (x.size() < 2)
        throw ParameterError("binned_entropy_1d: need at least 2 values");
    const double lo = x.minCoeff(), hi = x.maxCoeff();
    if (hi <= lo) return 0.0;
    std::vector<long> counts(static_cast<std::size_t>(bins), 0);
    const double scale = bins / (hi - lo);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        auto b = static_cast<long>((x[i] - lo) * scale);
        b = std::clamp(b, 0L, static_cast<long>(bins - 1));
        ++counts[static_cast<std::size_t>(b)];
    }
    const double n = static_cast<double>(x.size());
    double h = 0.0;
    for (long c : counts)
        if (c > 0) {
            double p = c / n;
            h -= p * std::log(p);
        }
    return h;
}

inline double digamma(double x) {
    double result = 0.0;
    while (x < 8.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    const double inv = 1.0 / x, inv2 = inv * inv;
    result += std::log(x) - 0.5 * inv -
              inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 / 240.0)));
    return result;
}

inline double unit_ball_log_volume(int d) {
    return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
}

namespace detail {

// Deterministic tie-breaking jitter: 1e-10 of the data range, seeded.
inline Matrix jitter_duplicates(const Matrix& X, std::uint64_t seed) {
    const double range = X.maxCoeff() - X.minCoeff();
    if (range <= 0.0) return X;
    Matrix out = X;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double mag = 1e-10 * range;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j)
            out(i, j) += mag * u(rng);
    return out;
}

inline bool has_duplicate_rows(const Matrix& X) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            if (X(a, c) != X(b, c)) return X(a, c) < X(b, c);
        }
        return false;
    });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (X.row(order[i]) == X.row(order[i - 1])) return true;
    return false;
}

// k-th nearest neighbor distances; sorted-window scan in 1-D, brute force otherwise.
inline std::vector<double> knn_distances(const Matrix& X, int k) {
    const Eigen::Index n = X.rows();
    std::vector<double> eps(static_cast<std::size_t>(n));
    if (X.cols() == 1) {
        std::vector<double> v(static_cast<std::size_t>(n));
        std::vector<Eigen::Index> pos(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = X(i, 0);
        std::vector<std::size_t> order(v.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> sorted(v.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted[i] = v[order[i]];
            pos[order[i]] = static_cast<Eigen::Index>(i);
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            long p = pos[i];
            long lo = p, hi = p;
            double kth = 0.0;
            for (int step = 0; step < k; ++step) {
                double dl = lo > 0 ? sorted[static_cast<std::size_t>(p)] - sorted[static_cast<std::size_t>(lo - 1)]
                                   : std::numeric_limits<double>::infinity();
                double dr = hi + 1 < n ? sorted[static_cast<std::size_t>(hi + 1)] - sorted[static_cast<std::size_t>(p)]
                                       : std::numeric_limits<double>::infinity();
                if (dl <= dr) {
                    kth = dl;
                    --lo;
                } else {
                    kth = dr;
                    ++hi;
                }
            }
            eps[i] = kth;
        }
        return eps;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> d;
        d.reserve(static_cast<std::size_t>(n - 1));
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i) d.push_back((X.row(i) - X.row(j)).norm());
        std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
        eps[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(k - 1)];
    }
    return eps;
}

}  // namespace detail

/// Kozachenko-Leonenko differential entropy with Euclidean balls, in nats:
///   H = psi(n) - psi(k) + ln V_d + (d/n) sum ln eps_i.
inline double knn_entropy(const Matrix& X, int k, std::uint64_t jitter_seed = 0) {
    const Eigen::Index n = X.rows();
    if (k < 1)
        throw ParameterError("knn_entropy: k must be >= 1");
    if (n <= k)
        throw ParameterError("knn_entropy: need more than k samples");
    Matrix data = X;
    if (detail::has_duplicate_rows(data))
        data = detail::jitter_duplicates(data, jitter_seed);
    const int d = static_cast<int>(X.cols());
    std::vector<double> eps = detail::knn_distances(data, k);
    double log_sum = 0.0;
    for (double e : eps) log_sum += std::log(std::max(e, 1e-300));
    return digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) +
           unit_ball_log_volume(d) + (static_cast<double>(d) / static_cast<double>(n)) * log_sum;
}

inline double estimate_1d(const Vector& x, const EstimatorConfig& cfg) {
    if (cfg.kind == Estimator::Binning) return binned_entropy_1d(x, cfg.bins);
    return knn_entropy(x, cfg.k, cfg.jitter_seed);
}

/// Independence-bound baseline: per-neuron entropies summed as if the layer
/// had zero neuronal correlation.
inline EntropyEstimate entropy_original(const ActivationMatrix& T, const EstimatorConfig& cfg) {
    T.validate();
    EntropyEstimate est;
    est.estimator = cfg.kind;
    est.space = Space::Original;
    est.config = cfg;
    for (Eigen::Index i = 0; i < T.neurons(); ++i) {
        EstimatorConfig c = cfg;
        c.jitter_seed = cfg.jitter_seed + static_cast<std::uint64_t>(i);
        double h = estimate_1d(T.values.col(i), c);
        est.per_dimension.push_back(h);
        est.value += h;
    }
    return est;
}

namespace detail {

struct RetainedDims {
    std::vector<Eigen::Index> indices;
    double eigenvalue_mass = 0.0;
};

// Splits the eigen-dimension variance spectrum at its largest ratio gap,
// separating informative dimensions from curvature terms. The floor keeps the
// search away from the numerically-dead tail.
inline RetainedDims split_signal_dimensions(const FeatureMatrix& F, const KernelEmbedConfig& cfg) {
    const Eigen::Index n = F.size();
    std::vector<std::pair<double, Eigen::Index>> vars;  // (variance, dim)
    for (Eigen::Index j = 0; j < n; ++j) {
        if (F.eigenvalues[j] <= kRankTol) continue;
        Vector row = F.columns.row(j).transpose();
        double mean = row.mean();
        double var = (row.array() - mean).square().sum() / static_cast<double>(n);
        vars.emplace_back(var, j);
    }
    if (vars.empty())
        throw DegenerateInputError("entropy_kernel_embedding: feature map has no usable dimensions");
    std::sort(vars.begin(), vars.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    const double vmax = vars.front().first;
    std::size_t split = 0;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i + 1 < vars.size(); ++i) {
        if (vars[i].first <= cfg.truncation_floor * vmax) break;
        if (vars[i + 1].first <= cfg.truncation_guard * vmax) break;
        double ratio = vars[i].first / vars[i + 1].first;
        if (ratio > best_ratio) {
            best_ratio = ratio;
            split = i;
        }
    }
    RetainedDims out;
    double total = F.eigenvalues.sum(), kept = 0.0;
    for (std::size_t i = 0; i <= split; ++i) {
        out.indices.push_back(vars[i].second);
        kept += F.eigenvalues[vars[i].second];
    }
    std::sort(out.indices.begin(), out.indices.end());
    out.eigenvalue_mass = total > 0.0 ? kept / total : 0.0;
    return out;
}

inline Matrix subsample_rows(const Matrix& X, Eigen::Index cap, std::uint64_t seed) {
    if (X.rows() <= cap) return X;
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    Matrix out(cap, X.cols());
    for (Eigen::Index i = 0; i < cap; ++i) out.row(i) = X.row(idx[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace detail

/// Kernel-embedding entropy: Gram matrix -> EVD feature map -> per-dimension
/// estimation over the informative eigen-dimensions. For the Gaussian kernel
/// in its near-linear regime the feature map contracts the data metric by
/// 1/sigma, so differential per-dimension estimates carry a +ln(sigma)
/// correction; the scale-invariant binning estimator needs none.
inline EntropyEstimate entropy_kernel_embedding(const ActivationMatrix& T,
                                                const KernelEmbedConfig& kcfg,
                                                const EstimatorConfig& ecfg) {
    T.validate();
    Matrix data = detail::subsample_rows(T.values, kcfg.max_gram_samples, kcfg.subsample_seed);
    ActivationMatrix sub{data, T.layer_id, T.epoch};

    double sigma;
    if (kcfg.sigma) {
        sigma = *kcfg.sigma;
        if (sigma <= 0.0) throw ParameterError("entropy_kernel_embedding: sigma must be positive");
    } else {
        sigma = kcfg.width_factor * median_pairwise_distance(data);  // throws if all samples identical
    }

    GramMatrix K = gram_matrix(sub, kcfg.kind, sigma);
    FeatureMatrix F = feature_map_evd(K);
    detail::RetainedDims retained = detail::split_signal_dimensions(F, kcfg);

    const bool correct_scale = ecfg.kind == Estimator::KNN && kcfg.kind == KernelKind::Gaussian;
    EntropyEstimate est;
    est.estimator = ecfg.kind;
    est.space = Space::Projected;
    est.config = ecfg;
    est.sigma_used = sigma;
    est.retained_rank = static_cast<Eigen::Index>(retained.indices.size());
    est.eigenvalue_mass = retained.eigenvalue_mass;
    est.dim_correlation = dimensional_correlation(F);
    if (retained.indices.size() >= 2) {
        ActivationMatrix kept;
        kept.values.resize(F.size(), static_cast<Eigen::Index>(retained.indices.size()));
        for (std::size_t c = 0; c < retained.indices.size(); ++c)
            kept.values.col(static_cast<Eigen::Index>(c)) = F.columns.row(retained.indices[c]).transpose();
        est.retained_dim_correlation = neuronal_correlation(kept).value;
    }
    for (std::size_t c = 0; c < retained.indices.size(); ++c) {
        Vector row = F.columns.row(retained.indices[c]).transpose();
        EstimatorConfig cfg = ecfg;
        cfg.jitter_seed = ecfg.jitter_seed + static_cast<std::uint64_t>(c);
        double h = estimate_1d(row, cfg);
        if (correct_scale) h += std::log(sigma);
        est.per_dimension.push_back(h);
        est.value += h;
    }
    return est;
}

/// Closed-form Gaussian differential entropy H = 1/2 ln((2 pi e)^d det Sigma).
inline double gaussian_entropy_analytic(const GaussianSpec& spec) {
    if (spec.covariance.rows() != spec.dimension || spec.covariance.cols() != spec.dimension)
        throw ParameterError("gaussian_entropy_analytic: covariance shape mismatch");
    Eigen::LLT<Matrix> llt(spec.covariance);
    if (llt.info() != Eigen::Success)
        throw ParameterError("gaussian_entropy_analytic: covariance not positive definite");
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < spec.dimension; ++i)
        log_det += 2.0 * std::log(llt.matrixL()(i, i));
    const double d = static_cast<double>(spec.dimension);
    return 0.5 * (d * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_det);
}

}  // namespace centropy

#endif
