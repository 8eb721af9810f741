#ifndef CENTROPY_STATS_HPP
#define CENTROPY_STATS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "centropy/types.hpp"

namespace centropy {

inline double median(std::vector<double> v) {
    if (v.empty()) throw ParameterError("median: empty input");
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Quartiles {
    double q1 = 0.0, q2 = 0.0, q3 = 0.0;
};

inline Quartiles quartiles(std::vector<double> v) {
    if (v.empty()) throw ParameterError("quartiles: empty input");
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        double pos = q * (static_cast<double>(v.size()) - 1.0);
        auto lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        double frac = pos - static_cast<double>(lo);
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };
    return Quartiles{at(0.25), at(0.5), at(0.75)};
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

/// Spearman rank correlation (tie-aware, via Pearson on ranks).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterError("spearman: need two equal-length series of >= 2 points");
    std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(rx.size());
    my /= static_cast<double>(ry.size());
    double num = 0, dx = 0, dy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx <= 0.0 || dy <= 0.0) return 0.0;
    return num / std::sqrt(dx * dy);
}

/// Unbiased (s-1 normalized) sample covariance of rows-as-samples.
inline Matrix empirical_covariance(const Matrix& samples) {
    if (samples.rows() < 2) throw ParameterError("empirical_covariance: need >= 2 samples");
    Matrix centered = samples.rowwise() - samples.colwise().mean();
    return centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
}

}  // namespace centropy

#endif
