#ifndef CENTROPY_NETWORK_HPP
#define CENTROPY_NETWORK_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "centropy/correlation.hpp"
#include "centropy/data.hpp"
#include "centropy/stats.hpp"
#include "centropy/types.hpp"

namespace centropy {

enum class Activation { Identity, ReLU, Tanh };
enum class InitScheme { Random, TruncatedNormal, Xavier, HeNormal };

struct NetworkSpec {
    std::vector<Eigen::Index> layer_sizes;  // [I, h1..hk, O]
    Activation activation = Activation::ReLU;
    InitScheme init = InitScheme::Xavier;
    std::uint64_t seed = 0;

    Eigen::Index hidden_layers() const {
        return static_cast<Eigen::Index>(layer_sizes.size()) - 2;
    }

    /// "784-20-20-10" style structure string; round-trips verbatim.
    static std::vector<Eigen::Index> parse_structure(const std::string& s) {
        std::vector<Eigen::Index> sizes;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, '-')) {
            if (tok.empty()) throw ParseError("structure string: empty field in '" + s + "'");
            try {
                long v = std::stol(tok);
                if (v < 1) throw ParseError("structure string: sizes must be >= 1 in '" + s + "'");
                sizes.push_back(v);
            } catch (const std::invalid_argument&) {
                throw ParseError("structure string: non-numeric field '" + tok + "' in '" + s + "'");
            }
        }
        if (sizes.size() < 2) throw ParseError("structure string: need at least input and output sizes");
        return sizes;
    }

    static std::string format_structure(const std::vector<Eigen::Index>& sizes) {
        std::string out;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            if (i) out += '-';
            out += std::to_string(sizes[i]);
        }
        return out;
    }
};

struct NetworkSnapshot {
    int epoch = 0;
    std::vector<WeightMatrix> weights;  // weights[l].values is (size_l x size_{l+1})
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

struct GeneralizationRecord {
    int epoch = 0;
    double gap = 0.0;  // train accuracy - test accuracy
    double nc_penultimate = 0.0;
    double wc_penultimate = 0.0;
};

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::ReLU: return "relu";
        default: return "tanh";
    }
}

inline const char* init_name(InitScheme s) {
    switch (s) {
        case InitScheme::Random: return "random";
        case InitScheme::TruncatedNormal: return "truncated-normal";
        case InitScheme::Xavier: return "xavier";
        default: return "he-normal";
    }
}

namespace detail {

inline double draw_normal(std::mt19937_64& rng) {
    // Box-Muller, cosine branch only, for a fixed draw count per normal.
    std::uniform_real_distribution<double> unit(std::numeric_limits<double>::min(), 1.0);
    double u1 = unit(rng), u2 = unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline Matrix init_weight_block(Eigen::Index m, Eigen::Index n, InitScheme scheme, std::mt19937_64& rng) {
    Matrix W(m, n);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    switch (scheme) {
        case InitScheme::Random: {
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < n; ++j) W(i, j) = -0.05 + 0.1 * u01(rng);
            break;
        }
        case InitScheme::TruncatedNormal: {
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    double z;
                    do {
                        z = draw_normal(rng);
                    } while (std::abs(z) > 2.0);
                    W(i, j) = 0.05 * z;
                }
            break;
        }
        case InitScheme::Xavier: {
            double limit = std::sqrt(6.0 / static_cast<double>(m + n));
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < n; ++j) W(i, j) = limit * (2.0 * u01(rng) - 1.0);
            break;
        }
        case InitScheme::HeNormal: {
            double sd = std::sqrt(2.0 / static_cast<double>(m));
            for (Eigen::Index i = 0; i < m; ++i)
                for (Eigen::Index j = 0; j < n; ++j) W(i, j) = sd * draw_normal(rng);
            break;
        }
    }
    return W;
}

inline Matrix apply_activation(const Matrix& z, Activation a) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::ReLU: return z.cwiseMax(0.0);
        default: return z.array().tanh().matrix();
    }
}

inline Matrix activation_derivative(const Matrix& z, Activation a) {
    switch (a) {
        case Activation::Identity: return Matrix::Ones(z.rows(), z.cols());
        case Activation::ReLU: return (z.array() > 0.0).cast<double>().matrix();
        default: return (1.0 - z.array().tanh().square()).matrix();
    }
}

}  // namespace detail

/// Epoch-0 snapshot with the requested initialization; biases start at zero.
inline NetworkSnapshot initialize(const NetworkSpec& spec) {
    for (Eigen::Index s : spec.layer_sizes)
        if (s < 1) throw ParameterError("initialize: layer sizes must be >= 1");
    std::mt19937_64 rng(spec.seed);
    NetworkSnapshot snap;
    for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
        WeightMatrix W;
        W.layer_id = static_cast<int>(l + 1);
        W.values = detail::init_weight_block(spec.layer_sizes[l], spec.layer_sizes[l + 1], spec.init, rng);
        W.bias = Vector::Zero(spec.layer_sizes[l + 1]);
        snap.weights.push_back(std::move(W));
    }
    return snap;
}

/// Forward pass recording the requested layer, 1-based; layer k+1 is the
/// output (pre-softmax for classification).
inline ActivationMatrix forward_record(const NetworkSnapshot& snap, const Matrix& inputs,
                                       int layer, Activation act) {
    const int n_layers = static_cast<int>(snap.weights.size());
    if (layer < 1 || layer > n_layers)
        throw ParameterError("forward_record: layer " + std::to_string(layer) + " out of range [1, " +
                             std::to_string(n_layers) + "]");
    Matrix h = inputs;
    for (int l = 0; l < layer; ++l) {
        Matrix z = (h * snap.weights[static_cast<std::size_t>(l)].values).rowwise() +
                   snap.weights[static_cast<std::size_t>(l)].bias.transpose();
        h = l == n_layers - 1 ? z : detail::apply_activation(z, act);
    }
    ActivationMatrix out;
    out.values = std::move(h);
    out.layer_id = layer;
    out.epoch = snap.epoch;
    return out;
}

inline Eigen::VectorXi predict(const NetworkSnapshot& snap, const Matrix& inputs, Activation act) {
    Matrix logits = forward_record(snap, inputs, static_cast<int>(snap.weights.size()), act).values;
    Eigen::VectorXi pred(logits.rows());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        Eigen::Index arg;
        logits.row(i).maxCoeff(&arg);
        pred[i] = static_cast<int>(arg);
    }
    return pred;
}

inline double accuracy(const NetworkSnapshot& snap, const Dataset& data, Activation act) {
    if (data.size() == 0) throw ParameterError("accuracy: empty dataset");
    Eigen::VectorXi pred = predict(snap, data.inputs, act);
    long hits = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i)
        if (pred[i] == data.labels[static_cast<std::size_t>(i)]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(pred.size());
}

struct TrainConfig {
    int epochs = 100;
    double learning_rate = 0.05;
    int batch_size = 64;
    int record_every = 10;
    std::uint64_t shuffle_seed = 0;
};

/// Plain SGD on softmax cross-entropy. Snapshots are recorded every
/// record_every epochs (plus epoch 0). Throws DivergenceError on NaN loss.
inline std::vector<NetworkSnapshot> train(NetworkSnapshot snap, const Dataset& train_set,
                                          const Dataset& test_set, Activation act,
                                          const TrainConfig& cfg) {
    if (train_set.size() == 0) throw ParameterError("train: empty dataset");
    if (!train_set.labeled()) throw ParameterError("train: dataset has no labels");
    const Eigen::Index n = train_set.size();
    const auto n_layers = static_cast<int>(snap.weights.size());
    std::mt19937_64 rng(cfg.shuffle_seed);

    std::vector<NetworkSnapshot> history;
    auto record = [&](int epoch) {
        snap.epoch = epoch;
        snap.train_accuracy = accuracy(snap, train_set, act);
        snap.test_accuracy = test_set.size() > 0 ? accuracy(snap, test_set, act) : 0.0;
        history.push_back(snap);
    };
    record(0);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
            const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - start);
            Matrix x(bs, train_set.dim());
            std::vector<int> y(static_cast<std::size_t>(bs));
            for (Eigen::Index b = 0; b < bs; ++b) {
                x.row(b) = train_set.inputs.row(order[static_cast<std::size_t>(start + b)]);
                y[static_cast<std::size_t>(b)] =
                    train_set.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + b)])];
            }

            std::vector<Matrix> hs{x}, zs;
            for (int l = 0; l < n_layers; ++l) {
                Matrix z = (hs.back() * snap.weights[static_cast<std::size_t>(l)].values).rowwise() +
                           snap.weights[static_cast<std::size_t>(l)].bias.transpose();
                zs.push_back(z);
                hs.push_back(l == n_layers - 1 ? z : detail::apply_activation(z, act));
            }

            // softmax cross-entropy gradient
            Matrix logits = hs.back();
            Matrix g(bs, logits.cols());
            double loss = 0.0;
            for (Eigen::Index b = 0; b < bs; ++b) {
                double m = logits.row(b).maxCoeff();
                Vector e = (logits.row(b).array() - m).exp();
                double sum = e.sum();
                g.row(b) = (e / sum).transpose();
                loss -= std::log(std::max(g(b, y[static_cast<std::size_t>(b)]), 1e-300));
                g(b, y[static_cast<std::size_t>(b)]) -= 1.0;
            }
            if (!std::isfinite(loss))
                throw DivergenceError("train: non-finite loss at epoch " + std::to_string(epoch));
            g /= static_cast<double>(bs);

            for (int l = n_layers - 1; l >= 0; --l) {
                Matrix gw = hs[static_cast<std::size_t>(l)].transpose() * g;
                Vector gb = g.colwise().sum().transpose();
                if (l > 0)
                    g = (g * snap.weights[static_cast<std::size_t>(l)].values.transpose())
                            .cwiseProduct(detail::activation_derivative(zs[static_cast<std::size_t>(l - 1)], act));
                snap.weights[static_cast<std::size_t>(l)].values -= cfg.learning_rate * gw;
                snap.weights[static_cast<std::size_t>(l)].bias -= cfg.learning_rate * gb;
            }
        }
        if (epoch % cfg.record_every == 0 || epoch == cfg.epochs) record(epoch);
    }
    return history;
}

/// Generalization gap with penultimate-layer NC/WC attached.
inline GeneralizationRecord generalization_gap(const NetworkSnapshot& snap, const Dataset& train_set,
                                               const Dataset& test_set, Activation act) {
    if (train_set.size() == 0 || test_set.size() == 0)
        throw ParameterError("generalization_gap: empty dataset");
    GeneralizationRecord rec;
    rec.epoch = snap.epoch;
    rec.gap = accuracy(snap, train_set, act) - accuracy(snap, test_set, act);
    const int penult = static_cast<int>(snap.weights.size()) - 1;
    if (penult >= 1) {
        rec.nc_penultimate = neuronal_correlation(forward_record(snap, train_set.inputs, penult, act)).value;
        rec.wc_penultimate = weight_correlation(snap.weights[static_cast<std::size_t>(penult - 1)]).value;
    }
    return rec;
}

struct SweepRow {
    Eigen::Index m = 0, n = 0;
    InitScheme init = InitScheme::Random;
    double mean_abs_wc = 0.0;
};

/// |WC| at initialization for a single m -> n layer, averaged over seeds.
/// The absolute-cosine variant is used since magnitude trends are the object
/// of study.
inline std::vector<SweepRow> wc_vs_structure_sweep(const std::vector<Eigen::Index>& m_range,
                                                   const std::vector<Eigen::Index>& n_range,
                                                   const std::vector<InitScheme>& inits,
                                                   int seeds = 20) {
    if (m_range.empty() || n_range.empty() || inits.empty())
        throw ParameterError("wc_vs_structure_sweep: empty range");
    std::vector<SweepRow> rows;
    for (InitScheme init : inits)
        for (Eigen::Index m : m_range)
            for (Eigen::Index n : n_range) {
                if (n < 2)
                    throw ParameterError("wc_vs_structure_sweep: need n >= 2 for column pairs");
                double sum = 0.0;
                for (int s = 0; s < seeds; ++s) {
                    NetworkSpec spec;
                    spec.layer_sizes = {m, n};
                    spec.init = init;
                    spec.seed = static_cast<std::uint64_t>(s);
                    NetworkSnapshot snap = initialize(spec);
                    sum += weight_correlation(snap.weights[0], /*absolute=*/true).value;
                }
                rows.push_back(SweepRow{m, n, init, sum / seeds});
            }
    return rows;
}

// ---- snapshot container: "CENT" magic, version u32, little-endian f64 ----

namespace detail {

template <typename T>
void write_raw(std::ostream& out, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError(std::string("snapshot: truncated reading ") + what);
    return v;
}

}  // namespace detail

inline constexpr std::uint32_t kSnapshotVersion = 1;

inline void save_snapshot(const NetworkSnapshot& snap, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out.write("CENT", 4);
    detail::write_raw<std::uint32_t>(out, kSnapshotVersion);
    detail::write_raw<std::int32_t>(out, snap.epoch);
    detail::write_raw<double>(out, snap.train_accuracy);
    detail::write_raw<double>(out, snap.test_accuracy);
    detail::write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(snap.weights.size()));
    for (const WeightMatrix& W : snap.weights) {
        detail::write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(W.values.rows()));
        detail::write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(W.values.cols()));
        for (Eigen::Index i = 0; i < W.values.rows(); ++i)
            for (Eigen::Index j = 0; j < W.values.cols(); ++j)
                detail::write_raw<double>(out, W.values(i, j));
        detail::write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(W.bias.size()));
        for (Eigen::Index j = 0; j < W.bias.size(); ++j) detail::write_raw<double>(out, W.bias[j]);
    }
}

inline NetworkSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CENT", 4) != 0)
        throw ParseError(path + ": bad magic (expected CENT)");
    auto version = detail::read_raw<std::uint32_t>(in, "version");
    if (version != kSnapshotVersion)
        throw ParseError(path + ": unsupported snapshot version " + std::to_string(version));
    NetworkSnapshot snap;
    snap.epoch = detail::read_raw<std::int32_t>(in, "epoch");
    snap.train_accuracy = detail::read_raw<double>(in, "train accuracy");
    snap.test_accuracy = detail::read_raw<double>(in, "test accuracy");
    auto n_layers = detail::read_raw<std::uint32_t>(in, "layer count");
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        auto rows = detail::read_raw<std::uint32_t>(in, "rows");
        auto cols = detail::read_raw<std::uint32_t>(in, "cols");
        WeightMatrix W;
        W.layer_id = static_cast<int>(l + 1);
        W.values.resize(rows, cols);
        for (std::uint32_t i = 0; i < rows; ++i)
            for (std::uint32_t j = 0; j < cols; ++j)
                W.values(i, j) = detail::read_raw<double>(in, "weight");
        auto blen = detail::read_raw<std::uint32_t>(in, "bias length");
        W.bias.resize(blen);
        for (std::uint32_t j = 0; j < blen; ++j) W.bias[j] = detail::read_raw<double>(in, "bias");
        snap.weights.push_back(std::move(W));
    }
    return snap;
}

}  // namespace centropy

#endif
