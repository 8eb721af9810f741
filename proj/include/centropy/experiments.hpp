#ifndef CENTROPY_EXPERIMENTS_HPP
#define CENTROPY_EXPERIMENTS_HPP

#include <Eigen/SVD>
#include <map>
#include <string>
#include <vector>

#include "centropy/correlation.hpp"
#include "centropy/data.hpp"
#include "centropy/entropy.hpp"
#include "centropy/network.hpp"
#include "centropy/stats.hpp"
#include "centropy/types.hpp"

namespace centropy {

// ---------------------------------------------------------------------------
// Linear-network invariance: identity nets preserve input information, so the
// per-layer entropy curves should coincide; the inter-layer spread measures
// estimator error.
// ---------------------------------------------------------------------------

struct LinearInvarianceConfig {
    std::vector<Eigen::Index> layer_sizes{64, 20, 20, 20, 20, 20, 10};
    int epochs = 100;
    int record_every = 10;
    double learning_rate = 0.05;
    int batch_size = 64;
    std::uint64_t seed = 0;
    Eigen::Index gram_subsample = 400;
    int knn_k = 3;
};

struct LinearLayerPoint {
    int epoch = 0;
    int layer = 0;
    double entropy_original = 0.0;
    double entropy_projected = 0.0;
    double nc_original = 0.0;
    double nc_projected = 0.0;
};

struct LinearInvarianceResult {
    std::vector<LinearLayerPoint> points;
    std::vector<double> epochs;  // recorded (post-initialization) epochs
    std::vector<double> gap_original;   // per epoch: max-min entropy across layers
    std::vector<double> gap_projected;
    double median_gap_original = 0.0;
    double median_gap_projected = 0.0;
    double median_nc_original = 0.0;
    double median_nc_projected = 0.0;
};

/// Trains an identity-activation net and measures per-layer entropy in both
/// spaces at each recorded epoch. The epoch-0 snapshot is skipped: untrained
/// estimates carry no invariance claim.
inline LinearInvarianceResult run_linear_invariance(const Dataset& train_set, const Dataset& test_set,
                                                    const LinearInvarianceConfig& cfg) {
    NetworkSpec spec;
    spec.layer_sizes = cfg.layer_sizes;
    spec.activation = Activation::Identity;
    spec.init = InitScheme::Xavier;
    spec.seed = cfg.seed;

    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.learning_rate = cfg.learning_rate;
    tc.batch_size = cfg.batch_size;
    tc.record_every = cfg.record_every;
    tc.shuffle_seed = cfg.seed + 1000;

    std::vector<NetworkSnapshot> history = train(initialize(spec), train_set, test_set,
                                                 Activation::Identity, tc);

    EstimatorConfig ec;
    ec.kind = Estimator::KNN;
    ec.k = cfg.knn_k;
    KernelEmbedConfig kc;
    kc.max_gram_samples = cfg.gram_subsample;

    const int hidden = static_cast<int>(cfg.layer_sizes.size()) - 2;
    LinearInvarianceResult res;
    std::vector<double> all_nc_o, all_nc_p;
    for (const NetworkSnapshot& snap : history) {
        if (snap.epoch == 0) continue;
        std::vector<double> ho, hp;
        for (int l = 1; l <= hidden; ++l) {
            ActivationMatrix T = forward_record(snap, train_set.inputs, l, Activation::Identity);
            EntropyEstimate orig = entropy_original(T, ec);
            EntropyEstimate proj = entropy_kernel_embedding(T, kc, ec);
            LinearLayerPoint p;
            p.epoch = snap.epoch;
            p.layer = l;
            p.entropy_original = orig.value;
            p.entropy_projected = proj.value;
            p.nc_original = neuronal_correlation(T).value;
            p.nc_projected = proj.retained_dim_correlation;
            res.points.push_back(p);
            ho.push_back(orig.value);
            hp.push_back(proj.value);
            all_nc_o.push_back(p.nc_original);
            all_nc_p.push_back(p.nc_projected);
        }
        res.epochs.push_back(snap.epoch);
        res.gap_original.push_back(*std::max_element(ho.begin(), ho.end()) -
                                   *std::min_element(ho.begin(), ho.end()));
        res.gap_projected.push_back(*std::max_element(hp.begin(), hp.end()) -
                                    *std::min_element(hp.begin(), hp.end()));
    }
    res.median_gap_original = median(res.gap_original);
    res.median_gap_projected = median(res.gap_projected);
    res.median_nc_original = median(all_nc_o);
    res.median_nc_projected = median(all_nc_p);
    return res;
}

// ---------------------------------------------------------------------------
// Gaussian ground truth: known-entropy inputs pushed through a volume-
// preserving linear layer, so the analytic value applies on both sides.
// ---------------------------------------------------------------------------

struct GroundTruthConfig {
    Eigen::Index n = 5000;
    Eigen::Index d = 5;
    std::vector<double> variances{0.3, 0.7, 1.0};
    std::vector<std::uint64_t> seeds{0, 1, 2};
    double condition_cap = 20.0;
    Eigen::Index gram_subsample = 1200;
    int knn_k = 3;
};

struct GroundTruthRow {
    std::uint64_t seed = 0;
    double variance = 0.0;
    double analytic = 0.0;
    double raw_original = 0.0;
    double raw_projected = 0.0;
    double post_original = 0.0;
    double post_projected = 0.0;
};

namespace detail {

/// Xavier-range random square matrix, resampled until its condition number is
/// at most `cap`, then scaled to unit |determinant| so it preserves volume
/// (and hence differential entropy).
inline Matrix well_conditioned_linear_map(Eigen::Index d, double cap, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const double limit = std::sqrt(6.0 / static_cast<double>(2 * d));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix W(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) W(i, j) = u(rng);
        Eigen::JacobiSVD<Matrix> svd(W);
        double smin = svd.singularValues()(d - 1);
        if (smin <= 0.0 || svd.singularValues()(0) / smin > cap) continue;
        double det = W.determinant();
        return W / std::pow(std::abs(det), 1.0 / static_cast<double>(d));
    }
    throw NumericalError("well_conditioned_linear_map: no acceptable sample in 1000 attempts");
}

}  // namespace detail

inline std::vector<GroundTruthRow> run_ground_truth(const GroundTruthConfig& cfg) {
    EstimatorConfig ec;
    ec.kind = Estimator::KNN;
    ec.k = cfg.knn_k;
    KernelEmbedConfig kc;
    kc.max_gram_samples = cfg.gram_subsample;

    std::vector<GroundTruthRow> rows;
    for (std::uint64_t seed : cfg.seeds) {
        Matrix W = detail::well_conditioned_linear_map(cfg.d, cfg.condition_cap, seed);
        for (std::size_t vi = 0; vi < cfg.variances.size(); ++vi) {
            const double var = cfg.variances[vi];
            GroundTruthRow row;
            row.seed = seed;
            row.variance = var;
            GaussianSpec gs;
            gs.dimension = cfg.d;
            gs.covariance = var * Matrix::Identity(cfg.d, cfg.d);
            gs.mean = Vector::Zero(cfg.d);
            row.analytic = gaussian_entropy_analytic(gs);

            Dataset X = sample_gaussian(cfg.n, cfg.d, var, seed * 10 + vi + 1);
            ActivationMatrix raw{X.inputs, 0, 0};
            ActivationMatrix post{X.inputs * W, 1, 0};
            row.raw_original = entropy_original(raw, ec).value;
            row.raw_projected = entropy_kernel_embedding(raw, kc, ec).value;
            row.post_original = entropy_original(post, ec).value;
            row.post_projected = entropy_kernel_embedding(post, kc, ec).value;
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Correlation vs generalization: three architectures of comparable size but
// different shape, tracked over training.
// ---------------------------------------------------------------------------

struct GEArchitecture {
    std::string name;
    std::vector<Eigen::Index> layer_sizes;
};

inline std::vector<GEArchitecture> default_ge_architectures(Eigen::Index input, Eigen::Index output) {
    return {{"N3", {input, 110, 10, output}},
            {"N4", {input, 40, 40, 40, output}},
            {"N5", {input, 30, 30, 30, 30, output}}};
}

struct GEConfig {
    std::vector<GEArchitecture> architectures;
    Activation activation = Activation::ReLU;
    int epochs = 300;
    int record_every = 10;
    double learning_rate = 0.05;
    int batch_size = 64;
    int seeds = 3;
};

struct GEEpochPoint {
    int epoch = 0;
    double gap = 0.0;
    double nc_penultimate = 0.0;
    Quartiles wc_quartiles;  // over layers
};

struct GERun {
    std::string architecture;
    std::uint64_t seed = 0;
    std::vector<GEEpochPoint> curve;
    double final_nc = 0.0;
    double final_gap = 0.0;
};

struct GEResult {
    std::vector<GERun> runs;
    // seed-medians per architecture, in input order
    std::vector<std::string> arch_names;
    std::vector<double> median_final_nc;
    std::vector<double> median_final_gap;
    double nc_gap_spearman = 0.0;
};

inline GEResult run_generalization_experiment(const Dataset& train_set, const Dataset& test_set,
                                              const GEConfig& cfg) {
    if (cfg.architectures.empty())
        throw ParameterError("run_generalization_experiment: no architectures");
    GEResult res;
    for (const GEArchitecture& arch : cfg.architectures) {
        std::vector<double> finals_nc, finals_gap;
        for (int s = 0; s < cfg.seeds; ++s) {
            NetworkSpec spec;
            spec.layer_sizes = arch.layer_sizes;
            spec.activation = cfg.activation;
            spec.init = InitScheme::Xavier;
            spec.seed = static_cast<std::uint64_t>(s);

            TrainConfig tc;
            tc.epochs = cfg.epochs;
            tc.learning_rate = cfg.learning_rate;
            tc.batch_size = cfg.batch_size;
            tc.record_every = cfg.record_every;
            tc.shuffle_seed = spec.seed + 1000;

            std::vector<NetworkSnapshot> history =
                train(initialize(spec), train_set, test_set, cfg.activation, tc);

            GERun run;
            run.architecture = arch.name;
            run.seed = spec.seed;
            for (const NetworkSnapshot& snap : history) {
                GEEpochPoint p;
                p.epoch = snap.epoch;
                p.gap = snap.train_accuracy - snap.test_accuracy;
                const int penult = static_cast<int>(snap.weights.size()) - 1;
                p.nc_penultimate =
                    neuronal_correlation(forward_record(snap, train_set.inputs, penult, cfg.activation))
                        .value;
                std::vector<double> wcs;
                for (const WeightMatrix& W : snap.weights) wcs.push_back(weight_correlation(W).value);
                p.wc_quartiles = quartiles(wcs);
                run.curve.push_back(p);
            }
            run.final_nc = run.curve.back().nc_penultimate;
            run.final_gap = run.curve.back().gap;
            finals_nc.push_back(run.final_nc);
            finals_gap.push_back(run.final_gap);
            res.runs.push_back(std::move(run));
        }
        res.arch_names.push_back(arch.name);
        res.median_final_nc.push_back(median(finals_nc));
        res.median_final_gap.push_back(median(finals_gap));
    }
    if (res.median_final_nc.size() >= 2)
        res.nc_gap_spearman = spearman(res.median_final_nc, res.median_final_gap);
    return res;
}

// ---------------------------------------------------------------------------
// Nonlinearity gap: epsilon on middle layers of a deep narrow net, with an
// identity-activation control where the closed form is exact up to sampling.
// ---------------------------------------------------------------------------

struct EpsilonStudyConfig {
    std::vector<Eigen::Index> layer_sizes{64, 30, 30, 30, 30, 10};
    int epochs = 100;
    double learning_rate = 0.05;
    int batch_size = 64;
    int seeds = 3;
    std::vector<int> layers{2, 3};
};

struct EpsilonRun {
    std::uint64_t seed = 0;
    std::vector<double> epsilon;  // one per requested layer
};

inline std::vector<EpsilonRun> run_epsilon_study(const Dataset& train_set, Activation act,
                                                 const EpsilonStudyConfig& cfg) {
    std::vector<EpsilonRun> runs;
    for (int s = 0; s < cfg.seeds; ++s) {
        NetworkSpec spec;
        spec.layer_sizes = cfg.layer_sizes;
        spec.activation = act;
        spec.init = InitScheme::Xavier;
        spec.seed = static_cast<std::uint64_t>(s);
        TrainConfig tc;
        tc.epochs = cfg.epochs;
        tc.learning_rate = cfg.learning_rate;
        tc.batch_size = cfg.batch_size;
        tc.record_every = cfg.epochs;  // final snapshot only
        tc.shuffle_seed = spec.seed + 1000;
        Dataset empty;
        std::vector<NetworkSnapshot> history = train(initialize(spec), train_set, empty, act, tc);
        const NetworkSnapshot& snap = history.back();

        EpsilonRun run;
        run.seed = spec.seed;
        for (int l : cfg.layers) {
            ActivationMatrix prev = forward_record(snap, train_set.inputs, l - 1, act);
            ActivationMatrix cur = forward_record(snap, train_set.inputs, l, act);
            Matrix sigma = empirical_covariance(prev.values);
            run.epsilon.push_back(
                epsilon_gap(cur, snap.weights[static_cast<std::size_t>(l - 1)], sigma).value);
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

// ---------------------------------------------------------------------------
// Initialization sweep: |WC| trends against layer fan-in/fan-out at init.
// ---------------------------------------------------------------------------

struct InitSweepConfig {
    Eigen::Index fixed_m = 100;
    Eigen::Index fixed_n = 100;
    std::vector<Eigen::Index> sweep{10, 50, 100, 200, 350, 500};
    std::vector<InitScheme> inits{InitScheme::Random, InitScheme::TruncatedNormal, InitScheme::Xavier,
                                  InitScheme::HeNormal};
    int seeds = 20;
};

struct InitSweepCurve {
    InitScheme init = InitScheme::Random;
    bool varying_n = false;  // false: m varies at fixed n
    std::vector<double> axis;
    std::vector<double> mean_abs_wc;
    double spearman_rho = 0.0;
};

inline std::vector<InitSweepCurve> run_init_sweep(const InitSweepConfig& cfg) {
    std::vector<InitSweepCurve> curves;
    for (InitScheme init : cfg.inits) {
        for (bool vary_n : {false, true}) {
            InitSweepCurve c;
            c.init = init;
            c.varying_n = vary_n;
            std::vector<Eigen::Index> ms = vary_n ? std::vector<Eigen::Index>{cfg.fixed_m} : cfg.sweep;
            std::vector<Eigen::Index> ns = vary_n ? cfg.sweep : std::vector<Eigen::Index>{cfg.fixed_n};
            std::vector<SweepRow> rows = wc_vs_structure_sweep(ms, ns, {init}, cfg.seeds);
            for (const SweepRow& r : rows) {
                c.axis.push_back(static_cast<double>(vary_n ? r.n : r.m));
                c.mean_abs_wc.push_back(r.mean_abs_wc);
            }
            c.spearman_rho = spearman(c.axis, c.mean_abs_wc);
            curves.push_back(std::move(c));
        }
    }
    return curves;
}

}  // namespace centropy

#endif
