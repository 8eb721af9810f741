#ifndef CENTROPY_KERNEL_HPP
#define CENTROPY_KERNEL_HPP

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "centropy/correlation.hpp"
#include "centropy/types.hpp"

namespace centropy {

enum class KernelKind { Gaussian, Laplacian };

constexpr double kEigenClampTol = -1e-10;  // below this, input is treated as indefinite
constexpr double kRankTol = 1e-10;

/// Pairwise kernel evaluations over a sample set. Symmetric, unit diagonal,
/// entries in [0,1] for both supported kernels.
struct GramMatrix {
    Matrix entries;  // n x n
    KernelKind kernel_kind = KernelKind::Gaussian;
    double width = 1.0;

    Eigen::Index size() const { return entries.rows(); }
};

/// Finite feature map from the EVD of a Gram matrix. Column i holds the
/// feature coordinates k_i of sample i; eigenvalues are sorted descending.
struct FeatureMatrix {
    Matrix columns;      // n x n, rows are eigen-dimensions
    Vector eigenvalues;  // n, descending, clamped at 0
    Eigen::Index rank = 0;  // eigenvalues above kRankTol

    Eigen::Index size() const { return columns.cols(); }
};

struct SpectrumBounds {
    double lambda_min_bound = 0.0;
    double lambda_max_bound = 0.0;
    bool vacuous() const { return lambda_min_bound <= 0.0; }
};

/// Squared feature-distance interval recovered from Gram-column distances.
/// Unbounded when the spectrum bounds are vacuous; callers fall back to EVD.
struct DistanceInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool unbounded = false;
};

struct WidthCandidate {
    double sigma = 0.0;
    double alignment = 0.0;
    double dim_correlation = 0.0;
    double objective = 0.0;
};

struct WidthSelection {
    double sigma = 0.0;
    double alignment = 0.0;
    double dim_correlation = 0.0;
    double objective = 0.0;
    std::vector<WidthCandidate> grid;
};

inline GramMatrix gram_matrix(const ActivationMatrix& X, KernelKind kind, double sigma) {
    X.validate();
    if (sigma <= 0.0)
        throw ParameterError("gram_matrix: sigma must be positive");
    const Eigen::Index n = X.samples();
    GramMatrix K;
    K.kernel_kind = kind;
    K.width = sigma;
    K.entries.resize(n, n);
    if (kind == KernelKind::Gaussian) {
        Vector sq = X.values.rowwise().squaredNorm();
        Matrix d2 = (sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                     2.0 * X.values * X.values.transpose())
                        .cwiseMax(0.0);
        K.entries = (-d2 / (2.0 * sigma * sigma)).array().exp();
    } else {
        for (Eigen::Index i = 0; i < n; ++i) {
            K.entries(i, i) = 1.0;
            for (Eigen::Index j = i + 1; j < n; ++j) {
                double d1 = (X.values.row(i) - X.values.row(j)).cwiseAbs().sum();
                double v = std::exp(-d1 / sigma);
                K.entries(i, j) = v;
                K.entries(j, i) = v;
            }
        }
    }
    K.entries.diagonal().setOnes();
    // enforce exact symmetry against rounding in the vectorized path
    K.entries = ((K.entries + K.entries.transpose()) / 2.0).eval();
    return K;
}

/// Full EVD feature map: K = V Lambda V^T, features are the columns of
/// Lambda^{1/2} V^T. Eigenvalues within kEigenClampTol of zero are clamped;
/// anything lower means the input was not a valid Gram matrix.
inline FeatureMatrix feature_map_evd(const GramMatrix& K) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(K.entries);
    if (solver.info() != Eigen::Success)
        throw NumericalError("feature_map_evd: eigendecomposition failed");
    const Eigen::Index n = K.size();
    FeatureMatrix F;
    F.eigenvalues.resize(n);
    F.columns.resize(n, n);
    // Eigen returns ascending order; emit descending.
    for (Eigen::Index i = 0; i < n; ++i) {
        double lambda = solver.eigenvalues()[n - 1 - i];
        if (lambda < kEigenClampTol)
            throw NumericalError("feature_map_evd: eigenvalue " + std::to_string(lambda) +
                                 " below tolerance; input is numerically indefinite");
        lambda = std::max(lambda, 0.0);
        F.eigenvalues[i] = lambda;
        F.columns.row(i) = std::sqrt(lambda) * solver.eigenvectors().col(n - 1 - i).transpose();
    }
    F.rank = (F.eigenvalues.array() > kRankTol).count();
    return F;
}

/// Gershgorin interval for a unit-diagonal Gram matrix:
/// 1 -/+ the largest off-diagonal row sum. The lower bound is frequently
/// negative for realistic widths, in which case it is reported as-is and the
/// derived distance sandwich is vacuous.
inline SpectrumBounds gershgorin_bounds(const GramMatrix& K) {
    const Eigen::Index n = K.size();
    double max_row = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = K.entries.row(i).cwiseAbs().sum() - std::abs(K.entries(i, i));
        max_row = std::max(max_row, row);
    }
    return SpectrumBounds{1.0 - max_row, 1.0 + max_row};
}

/// Bounds the squared feature distance ||k_i - k_j||^2 from the Gram-column
/// distance without an EVD, inverting the spectral sandwich
///   (l_min^2/l_max) ||k_i-k_j||^2 <= ||K_i-K_j||^2 <= (l_max^2/l_min) ||k_i-k_j||^2.
inline DistanceInterval bounded_distance_interval(const GramMatrix& K, const SpectrumBounds& bounds,
                                                  Eigen::Index i, Eigen::Index j) {
    const Eigen::Index n = K.size();
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw ParameterError("bounded_distance_interval: index out of range");
    if (bounds.vacuous())
        return DistanceInterval{0.0, 0.0, true};
    const double gram_d2 = (K.entries.col(i) - K.entries.col(j)).squaredNorm();
    const double lmin = bounds.lambda_min_bound, lmax = bounds.lambda_max_bound;
    return DistanceInterval{gram_d2 * lmin / (lmax * lmax), gram_d2 * lmax / (lmin * lmin), false};
}

/// Alignment A = tr(Ka Kb^T) / (||Ka||_F ||Kb||_F); equals 1 iff the matrices
/// are positive multiples of one another.
inline double kernel_alignment(const Matrix& ka, const Matrix& kb) {
    if (ka.rows() != kb.rows() || ka.cols() != kb.cols())
        throw ParameterError("kernel_alignment: dimension mismatch");
    const double na = ka.norm(), nb = kb.norm();
    if (na < 1e-300 || nb < 1e-300)
        throw ParameterError("kernel_alignment: zero Frobenius norm");
    return (ka.array() * kb.array()).sum() / (na * nb);
}

/// 0/1 class-indicator matrix: K_y[i,j] = 1 iff labels match.
inline Matrix label_kernel(const std::vector<int>& labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    if (n < 2)
        throw ParameterError("label_kernel: need at least 2 labels");
    Matrix ky(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            ky(i, j) = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? 1.0 : 0.0;
    return ky;
}

/// The feature matrix read as an activation matrix: samples are the columns,
/// eigen-dimensions are the neurons. Dimensions with eigenvalue at or below
/// kRankTol are numerically constant and excluded.
inline ActivationMatrix feature_dimensions_as_activations(const FeatureMatrix& F) {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < F.eigenvalues.size(); ++j)
        if (F.eigenvalues[j] > kRankTol) keep.push_back(j);
    ActivationMatrix act;
    act.values.resize(F.size(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t c = 0; c < keep.size(); ++c)
        act.values.col(static_cast<Eigen::Index>(c)) = F.columns.row(keep[c]).transpose();
    return act;
}

/// Average dimensional correlation of the feature map (NC over eigen-dimensions).
inline double dimensional_correlation(const FeatureMatrix& F) {
    ActivationMatrix act = feature_dimensions_as_activations(F);
    if (act.neurons() < 2) return 0.0;
    return neuronal_correlation(act).value;
}

inline double median_pairwise_distance(const Matrix& X) {
    const Eigen::Index n = X.rows();
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            double d = (X.row(i) - X.row(j)).norm();
            if (d > 0.0) dists.push_back(d);
        }
    if (dists.empty())
        throw DegenerateInputError("median_pairwise_distance: all samples identical");
    std::nth_element(dists.begin(), dists.begin() + static_cast<long>(dists.size() / 2), dists.end());
    return dists[dists.size() / 2];
}

/// Default logarithmic sigma grid: 20 points spanning [0.1, 10] x median distance.
inline std::vector<double> default_width_grid(const Matrix& X, int points = 20) {
    const double dmed = median_pairwise_distance(X);
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    const double lo = std::log(0.1 * dmed), hi = std::log(10.0 * dmed);
    for (int i = 0; i < points; ++i) {
        double t = points == 1 ? 0.5 : static_cast<double>(i) / (points - 1);
        grid.push_back(std::exp(lo + t * (hi - lo)));
    }
    return grid;
}

/// Width selection: argmax over the grid of alignment-to-label-kernel minus
/// beta times the feature map's dimensional correlation. Ties break toward
/// the smaller sigma.
inline WidthSelection select_kernel_width(const ActivationMatrix& X, const std::vector<int>& labels,
                                          double beta, const std::vector<double>& grid,
                                          KernelKind kind = KernelKind::Gaussian) {
    if (grid.empty())
        throw ParameterError("select_kernel_width: empty sigma grid");
    if (static_cast<Eigen::Index>(labels.size()) != X.samples())
        throw ParameterError("select_kernel_width: label count must match sample count");
    Matrix ky = label_kernel(labels);

    WidthSelection sel;
    std::vector<double> sorted_grid = grid;
    std::sort(sorted_grid.begin(), sorted_grid.end());
    bool first = true;
    for (double sigma : sorted_grid) {
        GramMatrix K = gram_matrix(X, kind, sigma);
        WidthCandidate cand;
        cand.sigma = sigma;
        cand.alignment = kernel_alignment(K.entries, ky);
        cand.dim_correlation = dimensional_correlation(feature_map_evd(K));
        cand.objective = cand.alignment - beta * cand.dim_correlation;
        sel.grid.push_back(cand);
        if (first || cand.objective > sel.objective) {
            first = false;
            sel.sigma = cand.sigma;
            sel.alignment = cand.alignment;
            sel.dim_correlation = cand.dim_correlation;
            sel.objective = cand.objective;
        }
    }
    return sel;
}

}  // namespace centropy

#endif
