#ifndef CENTROPY_CORRELATION_HPP
#define CENTROPY_CORRELATION_HPP

#include <cmath>
#include <optional>
#include <set>
#include <vector>

#include "centropy/types.hpp"

namespace centropy {

enum class Measure { NC, WC, PreNC, Epsilon, Gamma };

struct CorrelationReport {
    double value = 0.0;
    Measure measure = Measure::NC;
    long pair_count = 0;
    long skipped_pairs = 0;  // degenerate pairs that contributed 0
};

constexpr double kDegenerateStd = 1e-12;

/// Pearson correlation of two equal-length series. Returns nullopt when either
/// standard deviation is below 1e-12 (the coefficient is undefined there).
inline std::optional<double> pearson(const Vector& x, const Vector& y) {
    if (x.size() != y.size())
        throw ParameterError("pearson: length mismatch");
    if (x.size() < 2)
        throw ParameterError("pearson: need at least 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = x.mean(), my = y.mean();
    const Vector dx = x.array() - mx, dy = y.array() - my;
    const double sx = std::sqrt(dx.squaredNorm() / n);
    const double sy = std::sqrt(dy.squaredNorm() / n);
    if (sx < kDegenerateStd || sy < kDegenerateStd)
        return std::nullopt;
    double r = dx.dot(dy) / (n * sx * sy);
    return std::clamp(r, -1.0, 1.0);
}

/// Average absolute Pearson correlation over all ordered neuron pairs.
/// Degenerate (near-constant) neurons make the coefficient undefined; such
/// pairs contribute 0 and are counted separately.
inline CorrelationReport neuronal_correlation(const ActivationMatrix& T) {
    T.validate();
    const Eigen::Index n = T.neurons();
    if (n < 2)
        throw ParameterError("neuronal_correlation: need at least 2 neurons");
    const Eigen::Index s = T.samples();

    Matrix centered = T.values.rowwise() - T.values.colwise().mean();
    Vector sd = (centered.colwise().squaredNorm() / static_cast<double>(s))
                    .cwiseSqrt()
                    .transpose();
    Matrix cov = centered.transpose() * centered / static_cast<double>(s);

    CorrelationReport rep;
    rep.measure = Measure::NC;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            ++rep.pair_count;
            if (sd[i] < kDegenerateStd || sd[j] < kDegenerateStd) {
                ++rep.skipped_pairs;
                continue;
            }
            sum += std::min(1.0, std::abs(cov(i, j)) / (sd[i] * sd[j]));
        }
    }
    rep.value = sum / static_cast<double>(n * (n - 1));
    return rep;
}

/// Average pairwise cosine between weight columns. Signed by default; the
/// absolute-cosine variant averages |cos| instead.
inline CorrelationReport weight_correlation(const WeightMatrix& W, bool absolute = false) {
    const Eigen::Index n = W.values.cols();
    if (n < 2)
        throw ParameterError("weight_correlation: need at least 2 columns");
    Vector norms = W.values.colwise().norm();
    for (Eigen::Index i = 0; i < n; ++i)
        if (norms[i] < kDegenerateStd)
            throw DegenerateInputError("weight_correlation: zero column " + std::to_string(i));

    Matrix unit = W.values.array().rowwise() / norms.transpose().array();
    Matrix cosines = unit.transpose() * unit;

    CorrelationReport rep;
    rep.measure = Measure::WC;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            ++rep.pair_count;
            double c = std::clamp(cosines(i, j), -1.0, 1.0);
            sum += absolute ? std::abs(c) : c;
        }
    }
    rep.value = sum / static_cast<double>(n * (n - 1));
    return rep;
}

/// Pre-activation covariance cov(U_i, U_j) = W_j^T Sigma W_i for U = W^T x
/// with x having covariance Sigma. With Wi == Wj this is the variance.
inline double preactivation_covariance(const Vector& wi, const Vector& wj, const Matrix& sigma_prev) {
    if (wi.size() != wj.size() || sigma_prev.rows() != wi.size() || sigma_prev.cols() != wi.size())
        throw ParameterError("preactivation_covariance: dimension mismatch");
    return wj.dot(sigma_prev * wi);
}

/// NC of the pre-activations, in closed form from the weights and the previous
/// layer's covariance.
inline CorrelationReport preactivation_correlation(const WeightMatrix& W, const Matrix& sigma_prev) {
    const Eigen::Index n = W.values.cols();
    if (n < 2)
        throw ParameterError("preactivation_correlation: need at least 2 columns");
    if (sigma_prev.rows() != W.values.rows() || sigma_prev.cols() != W.values.rows())
        throw ParameterError("preactivation_correlation: covariance dimension mismatch");

    Matrix cov = W.values.transpose() * sigma_prev * W.values;
    Vector sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();

    CorrelationReport rep;
    rep.measure = Measure::PreNC;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            ++rep.pair_count;
            if (sd[i] < kDegenerateStd || sd[j] < kDegenerateStd) {
                ++rep.skipped_pairs;
                continue;
            }
            sum += std::min(1.0, std::abs(cov(i, j)) / (sd[i] * sd[j]));
        }
    }
    rep.value = sum / static_cast<double>(n * (n - 1));
    return rep;
}

/// |NC(activations) - PreNC(weights, prev covariance)|: the nonlinearity's
/// contribution to the layer's correlation.
inline CorrelationReport epsilon_gap(const ActivationMatrix& T, const WeightMatrix& W,
                                     const Matrix& sigma_prev) {
    CorrelationReport nc = neuronal_correlation(T);
    CorrelationReport pre = preactivation_correlation(W, sigma_prev);
    CorrelationReport rep;
    rep.measure = Measure::Epsilon;
    rep.value = std::abs(nc.value - pre.value);
    rep.pair_count = nc.pair_count;
    rep.skipped_pairs = nc.skipped_pairs + pre.skipped_pairs;
    return rep;
}

/// Layer connectivity: parent_sets[i] holds the previous-layer indices feeding
/// neuron i. Fully-connected patterns list every parent for every neuron.
struct ConnectivityPattern {
    std::vector<std::set<int>> parent_sets;
    double gamma = 1.0;

    static ConnectivityPattern fully_connected(int m, int n, double gamma = 1.0) {
        ConnectivityPattern p;
        p.gamma = gamma;
        std::set<int> all;
        for (int i = 0; i < m; ++i) all.insert(i);
        p.parent_sets.assign(static_cast<std::size_t>(n), all);
        return p;
    }

    /// 1-D convolution connectivity: output neuron i reads inputs [i*stride, i*stride+width).
    static ConnectivityPattern conv1d(int input_len, int filter_width, int stride, double gamma = 1.0) {
        if (filter_width < 1 || stride < 1 || input_len < filter_width)
            throw ParameterError("conv1d: invalid geometry");
        ConnectivityPattern p;
        p.gamma = gamma;
        for (int start = 0; start + filter_width <= input_len; start += stride) {
            std::set<int> parents;
            for (int k = 0; k < filter_width; ++k) parents.insert(start + k);
            p.parent_sets.push_back(std::move(parents));
        }
        return p;
    }
};

inline long shared_parent_count(const std::set<int>& a, const std::set<int>& b) {
    long count = 0;
    for (int v : a)
        if (b.count(v)) ++count;
    return count;
}

/// Structure-correlation coefficient: per-neuron ratio of summed shared-parent
/// counts to the count of neurons it interacts with, averaged over the layer.
/// The j-sum runs over all neurons including j = i.
inline CorrelationReport structure_correlation_coefficient(const ConnectivityPattern& pattern) {
    if (pattern.gamma <= 0.0)
        throw ParameterError("structure_correlation_coefficient: gamma must be positive");
    const std::size_t n = pattern.parent_sets.size();
    if (n == 0)
        throw ParameterError("structure_correlation_coefficient: empty layer");
    for (std::size_t i = 0; i < n; ++i)
        if (pattern.parent_sets[i].empty())
            throw ParameterError("structure_correlation_coefficient: neuron " + std::to_string(i) +
                                 " has no parents");

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double g_sum = 0.0, f_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            long shared = shared_parent_count(pattern.parent_sets[i], pattern.parent_sets[j]);
            g_sum += static_cast<double>(shared);
            f_sum += shared > 0 ? 1.0 : 0.0;
        }
        total += g_sum / (pattern.gamma * f_sum);  // f_sum >= 1 since f(i,i)=1
    }

    CorrelationReport rep;
    rep.measure = Measure::Gamma;
    rep.value = total / static_cast<double>(n);
    rep.pair_count = static_cast<long>(n * n);
    return rep;
}

}  // namespace centropy

#endif
