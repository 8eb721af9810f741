// End-to-end acceptance suite: one pass/fail line per criterion, desk scale.
// Run with no arguments for all criteria, or with a single number (1-8).
#include <cstdio>
#include <cstring>
#include <iostream>
#include <sstream>

#include "centropy/experiments.hpp"

using namespace centropy;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL") << " — " << detail
              << std::endl;
    if (!pass) ++g_failures;
}

Dataset digits_train(Eigen::Index subset = 0) {
    Dataset ds = load_idx(std::string(DIGITS_DIR) + "/train-images-idx3-ubyte",
                          std::string(DIGITS_DIR) + "/train-labels-idx1-ubyte");
    if (subset > 0 && subset < ds.size()) {
        ds.inputs = ds.inputs.topRows(subset).eval();
        ds.labels.resize(static_cast<std::size_t>(subset));
    }
    return ds;
}

Dataset digits_test() {
    return load_idx(std::string(DIGITS_DIR) + "/t10k-images-idx3-ubyte",
                    std::string(DIGITS_DIR) + "/t10k-labels-idx1-ubyte");
}

// --- 1: Gaussian ground truth -------------------------------------------------

void criterion_1() {
    GroundTruthConfig cfg;  // n=5000, d=5, variances {0.3,0.7,1.0}, seeds {0,1,2}
    std::vector<GroundTruthRow> rows = run_ground_truth(cfg);
    const double expected[] = {4.0849, 6.2033, 7.0947};
    bool pass = true;
    std::ostringstream detail;
    double worst_rel = 0.0;
    for (const auto& r : rows) {
        for (int i = 0; i < 3; ++i)
            if (std::abs(r.variance - cfg.variances[static_cast<std::size_t>(i)]) < 1e-12 &&
                std::abs(r.analytic - expected[i]) > 1e-3)
                pass = false;
        double eo = std::abs(r.post_original - r.analytic);
        double ep = std::abs(r.post_projected - r.analytic);
        double rel = ep / r.analytic;
        worst_rel = std::max(worst_rel, rel);
        if (!(ep < eo) || !(rel < 0.15)) {
            pass = false;
            detail << " [seed " << r.seed << " var " << r.variance << ": orig err " << eo
                   << ", proj err " << ep << "]";
        }
    }
    report(1, pass,
           "projected beats original on every post-network estimate; worst projected relative "
           "error " +
               std::to_string(worst_rel) + detail.str());
}

// --- 2: identity-network entropy invariance ----------------------------------

void criterion_2() {
    LinearInvarianceConfig cfg;  // 64-20-20-20-20-20-10, 100 epochs, snapshots every 10
    Dataset tr = digits_train();
    Dataset te = digits_test();
    LinearInvarianceResult res = run_linear_invariance(tr, te, cfg);
    bool gap_ok = res.median_gap_projected < res.median_gap_original;
    bool nc_ok = res.median_nc_projected < 0.1 && res.median_nc_original > res.median_nc_projected;
    std::ostringstream detail;
    detail << "median inter-layer gap " << res.median_gap_projected << " (projected) vs "
           << res.median_gap_original << " (original); median NC " << res.median_nc_projected
           << " (projected) vs " << res.median_nc_original << " (original)";
    report(2, gap_ok && nc_ok, detail.str());
}

// --- 3: NC ordering and NC-gap correlation across depths ----------------------

void criterion_3() {
    Dataset tr = digits_train(1200);
    Dataset te = digits_test();
    bool pass = true;
    std::ostringstream detail;
    for (Activation act : {Activation::ReLU, Activation::Tanh}) {
        GEConfig cfg;
        cfg.activation = act;
        cfg.epochs = 300;
        cfg.record_every = 50;
        cfg.seeds = 3;
        cfg.architectures = default_ge_architectures(tr.dim(), 10);
        GEResult res = run_generalization_experiment(tr, te, cfg);
        bool order = res.median_final_nc[0] < res.median_final_nc[1] &&
                     res.median_final_nc[1] < res.median_final_nc[2];
        bool corr = res.nc_gap_spearman > 0.0;
        if (!(order && corr)) pass = false;
        detail << activation_name(act) << ": median final NC " << res.median_final_nc[0]
               << " (N3) < " << res.median_final_nc[1] << " (N4) < " << res.median_final_nc[2]
               << " (N5): " << (order ? "yes" : "no") << ", NC-gap Spearman "
               << res.nc_gap_spearman << "; ";
    }
    report(3, pass, detail.str());
}

// --- 4: epsilon smallness on middle layers ------------------------------------

void criterion_4() {
    Dataset tr = digits_train();
    EpsilonStudyConfig cfg;  // 64-30-30-30-30-10, 100 epochs, layers 2 and 3, 3 seeds
    bool pass = true;
    std::ostringstream detail;
    struct Case {
        Activation act;
        double tol;
        const char* name;
    };
    for (const Case& c : {Case{Activation::Tanh, 0.2, "tanh"}, Case{Activation::Identity, 0.02, "identity"}}) {
        std::vector<EpsilonRun> runs = run_epsilon_study(tr, c.act, cfg);
        for (std::size_t li = 0; li < cfg.layers.size(); ++li) {
            std::vector<double> eps;
            for (const auto& r : runs) eps.push_back(r.epsilon[li]);
            double med = median(eps);
            if (!(med < c.tol)) pass = false;
            detail << c.name << " layer " << cfg.layers[li] << ": " << med << " (< " << c.tol
                   << "); ";
        }
    }
    report(4, pass, detail.str());
}

// --- 5: |WC| trends against layer sizes at initialization ---------------------

void criterion_5() {
    InitSweepConfig cfg;  // m,n in {10..500}, 20 seeds, four initializations
    std::vector<InitSweepCurve> curves = run_init_sweep(cfg);
    bool pass = true;
    std::ostringstream detail;
    for (const auto& c : curves) {
        bool ok = c.varying_n ? c.spearman_rho > 0.8 : c.spearman_rho < -0.8;
        if (!ok) pass = false;
        detail << init_name(c.init) << " vs " << (c.varying_n ? 'n' : 'm') << ": rho "
               << c.spearman_rho << (ok ? "" : " (!)") << "; ";
    }
    report(5, pass, detail.str());
}

// --- 6: kernel-math property suite --------------------------------------------

void criterion_6() {
    bool pass = true;
    std::ostringstream detail;
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<Eigen::Index> size(5, 50);
    std::uniform_real_distribution<double> width(0.3, 3.0);

    double worst_pres = 0.0;
    bool gersh_ok = true;
    for (int t = 0; t < 100; ++t) {
        Eigen::Index n = size(rng);
        ActivationMatrix X{sample_gaussian(n, 4, 1.0, 500 + static_cast<std::uint64_t>(t)).inputs, 0, 0};
        GramMatrix K = gram_matrix(X, KernelKind::Gaussian, width(rng));
        FeatureMatrix F = feature_map_evd(K);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                double d2 = (F.columns.col(i) - F.columns.col(j)).squaredNorm();
                double kd = K.entries(i, i) + K.entries(j, j) - 2.0 * K.entries(i, j);
                worst = std::max(worst, std::abs(d2 - kd));
            }
        worst_pres = std::max(worst_pres, worst / static_cast<double>(n));
        if (worst > 1e-8 * static_cast<double>(n)) pass = false;

        SpectrumBounds b = gershgorin_bounds(K);
        Eigen::SelfAdjointEigenSolver<Matrix> es(K.entries);
        if (es.eigenvalues().minCoeff() < b.lambda_min_bound - 1e-10 ||
            es.eigenvalues().maxCoeff() > b.lambda_max_bound + 1e-10) {
            gersh_ok = false;
            pass = false;
        }
        if (std::abs(kernel_alignment(K.entries, K.entries) - 1.0) > 1e-12) pass = false;
    }
    detail << "distance preservation worst " << worst_pres << " per sample; Gershgorin containment "
           << (gersh_ok ? "100/100" : "violated");

    // NC/WC invariances
    ActivationMatrix T{sample_gaussian(500, 4, 1.0, 600).inputs, 0, 0};
    double base_nc = neuronal_correlation(T).value;
    ActivationMatrix U = T;
    U.values.col(1) = -3.0 * U.values.col(1).array() + 2.0;
    if (std::abs(neuronal_correlation(U).value - base_nc) > 1e-12) {
        pass = false;
        detail << "; NC affine invariance violated";
    }
    WeightMatrix W;
    W.values = sample_gaussian(6, 5, 1.0, 601).inputs;
    double base_wc = weight_correlation(W).value;
    WeightMatrix V = W;
    V.values.col(2) *= 42.0;
    if (std::abs(weight_correlation(V).value - base_wc) > 1e-12) {
        pass = false;
        detail << "; WC scale invariance violated";
    }

    // KL estimator accuracy
    double h = knn_entropy(sample_gaussian(10000, 1, 1.0, 602).inputs, 3);
    double analytic = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
    detail << "; 1-D KL error " << std::abs(h - analytic);
    if (std::abs(h - analytic) > 0.05) pass = false;

    report(6, pass, detail.str());
}

// --- 7: closed forms vs independent oracles -----------------------------------

void criterion_7() {
    bool pass = true;
    std::ostringstream detail;

    // Pre-activation covariance vs Monte Carlo over 1e6 draws, 20 instances.
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index d = 5;
        Matrix A(d, d);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < d; ++j) A(i, j) = nd(rng);
        Matrix sigma = A * A.transpose();
        Matrix L = Eigen::LLT<Matrix>(sigma).matrixL();
        Vector wi(d), wj(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            wi[i] = nd(rng);
            wj[i] = nd(rng);
        }
        double closed = preactivation_covariance(wi, wj, sigma);

        const long N = 1000000;
        std::mt19937_64 mc(1000 + static_cast<std::uint64_t>(t));
        double sum_i = 0, sum_j = 0, sum_ij = 0;
        Vector z(d);
        for (long s = 0; s < N; ++s) {
            for (Eigen::Index c = 0; c < d; ++c) z[c] = nd(mc);
            Vector x = L * z;
            double ui = wi.dot(x), uj = wj.dot(x);
            sum_i += ui;
            sum_j += uj;
            sum_ij += ui * uj;
        }
        double mc_cov = sum_ij / N - (sum_i / N) * (sum_j / N);
        double scale = std::sqrt(preactivation_covariance(wi, wi, sigma) *
                                 preactivation_covariance(wj, wj, sigma));
        double rel = std::abs(mc_cov - closed) / scale;
        worst = std::max(worst, rel);
        if (rel > 0.01) pass = false;
    }
    detail << "covariance vs Monte Carlo worst deviation " << worst << " (of scale, < 0.01)";

    // Structure coefficient vs brute-force intersection enumeration.
    std::uniform_int_distribution<int> m_dist(4, 20), n_dist(2, 12);
    bool gamma_ok = true;
    for (int t = 0; t < 50; ++t) {
        int m = m_dist(rng), n = n_dist(rng);
        std::uniform_real_distribution<double> keep(0.0, 1.0);
        ConnectivityPattern p;
        p.gamma = 0.5 + keep(rng) * 2.0;
        for (int i = 0; i < n; ++i) {
            std::set<int> parents;
            while (parents.empty())
                for (int v = 0; v < m; ++v)
                    if (keep(rng) < 0.3) parents.insert(v);
            p.parent_sets.push_back(std::move(parents));
        }
        double fast = structure_correlation_coefficient(p).value;
        double slow = 0.0;
        for (int i = 0; i < n; ++i) {
            double g = 0, f = 0;
            for (int j = 0; j < n; ++j) {
                long inter = 0;
                for (int v : p.parent_sets[static_cast<std::size_t>(i)])
                    if (p.parent_sets[static_cast<std::size_t>(j)].count(v)) ++inter;
                g += static_cast<double>(inter);
                f += inter > 0 ? 1 : 0;
            }
            slow += g / (p.gamma * f);
        }
        slow /= n;
        if (std::abs(fast - slow) > 1e-12) {
            gamma_ok = false;
            pass = false;
        }
    }
    detail << "; structure coefficient vs enumeration " << (gamma_ok ? "50/50 exact" : "mismatch");
    report(7, pass, detail.str());
}

// --- 8: analytic gradients vs finite differences ------------------------------

void criterion_8() {
    Dataset a = sample_gaussian(8, 2, 0.25, 3);
    Dataset b = sample_gaussian(8, 2, 0.25, 4);
    Dataset ds;
    ds.inputs.resize(16, 2);
    ds.inputs.topRows(8) = a.inputs;
    ds.inputs.bottomRows(8) = b.inputs.array() + 2.0;
    ds.labels.assign(16, 0);
    for (int i = 8; i < 16; ++i) ds.labels[static_cast<std::size_t>(i)] = 1;

    NetworkSpec spec;
    spec.layer_sizes = {2, 3, 2};
    spec.seed = 9;
    NetworkSnapshot before = initialize(spec);

    auto loss_at = [&](const NetworkSnapshot& snap) {
        Matrix logits =
            forward_record(snap, ds.inputs, static_cast<int>(snap.weights.size()), Activation::Tanh)
                .values;
        double loss = 0.0;
        for (Eigen::Index i = 0; i < logits.rows(); ++i) {
            double m = logits.row(i).maxCoeff();
            double denom = (logits.row(i).array() - m).exp().sum();
            loss -= logits(i, ds.labels[static_cast<std::size_t>(i)]) - m - std::log(denom);
        }
        return loss / static_cast<double>(logits.rows());
    };

    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 16;
    cfg.learning_rate = 1e-3;
    cfg.record_every = 1;
    NetworkSnapshot after = train(before, ds, ds, Activation::Tanh, cfg).back();

    double worst = 0.0;
    const double h = 1e-6;
    for (std::size_t l = 0; l < before.weights.size(); ++l)
        for (Eigen::Index i = 0; i < before.weights[l].values.rows(); ++i)
            for (Eigen::Index j = 0; j < before.weights[l].values.cols(); ++j) {
                double analytic = (before.weights[l].values(i, j) - after.weights[l].values(i, j)) /
                                  cfg.learning_rate;
                NetworkSnapshot plus = before, minus = before;
                plus.weights[l].values(i, j) += h;
                minus.weights[l].values(i, j) -= h;
                double numeric = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
                worst = std::max(worst, std::abs(analytic - numeric) / (std::abs(numeric) + 1.0));
            }
    report(8, worst < 1e-5, "worst gradient relative error " + std::to_string(worst));
}

}  // namespace

int main(int argc, char** argv) {
    void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                            criterion_5, criterion_6, criterion_7, criterion_8};
    if (argc > 1) {
        int n = std::atoi(argv[1]);
        if (n < 1 || n > 8) {
            std::cerr << "usage: acceptance [1-8]\n";
            return 64;
        }
        criteria[n - 1]();
    } else {
        for (auto* c : criteria) c();
    }
    return g_failures == 0 ? 0 : 1;
}
