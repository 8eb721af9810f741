// Command-line surface: correlation measures, entropy estimation, and the
// desk-scale experiments, with JSON/CSV reports and SVG plots.
#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "centropy/experiments.hpp"
#include "centropy/report.hpp"

namespace fs = std::filesystem;
using namespace centropy;

namespace {

std::string output_dir(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("CENTROPY_OUT")) return env;
    return ".";
}

ActivationMatrix load_activations(const std::string& path) {
    Dataset ds = load_csv(path, false);
    return ActivationMatrix{ds.inputs, 0, 0};
}

void print_report(const CorrelationReport& rep, const std::string& measure, bool json) {
    if (json) {
        Json j;
        j["measure"] = measure;
        j["value"] = rep.value;
        j["pair_count"] = rep.pair_count;
        j["skipped_pairs"] = rep.skipped_pairs;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << measure << " = " << rep.value << "  (pairs: " << rep.pair_count
                  << ", skipped: " << rep.skipped_pairs << ")\n";
    }
}

Json estimate_to_json(const EntropyEstimate& est) {
    Json j;
    j["value_nats"] = est.value;
    j["estimator"] = est.estimator == Estimator::KNN ? "knn" : "binning";
    j["space"] = est.space == Space::Projected ? "projected" : "original";
    j["per_dimension"] = est.per_dimension;
    if (est.space == Space::Projected) {
        j["retained_rank"] = est.retained_rank;
        j["eigenvalue_mass"] = est.eigenvalue_mass;
        j["dimensional_correlation"] = est.dim_correlation;
        j["retained_dimensional_correlation"] = est.retained_dim_correlation;
        j["sigma"] = est.sigma_used;
    }
    return j;
}

const char* init_flag_name(InitScheme s) { return init_name(s); }

void emit_linear(const LinearInvarianceResult& res, const LinearInvarianceConfig& cfg,
                 const std::string& dir) {
    fs::create_directories(dir);
    Json j = report_envelope("linear-invariance",
                             Json{{"structure", NetworkSpec::format_structure(cfg.layer_sizes)},
                                  {"epochs", cfg.epochs},
                                  {"record_every", cfg.record_every},
                                  {"learning_rate", cfg.learning_rate},
                                  {"batch_size", cfg.batch_size},
                                  {"seed", cfg.seed},
                                  {"gram_subsample", cfg.gram_subsample},
                                  {"gap_metric", "per-epoch max-min entropy across layers"}});
    j["summary"] = {{"median_gap_original", res.median_gap_original},
                    {"median_gap_projected", res.median_gap_projected},
                    {"median_nc_original", res.median_nc_original},
                    {"median_nc_projected", res.median_nc_projected}};
    write_json(j, dir + "/linear_report.json");

    Table t;
    std::vector<double> ep, layer, ho, hp, no, np;
    for (const auto& p : res.points) {
        ep.push_back(p.epoch);
        layer.push_back(p.layer);
        ho.push_back(p.entropy_original);
        hp.push_back(p.entropy_projected);
        no.push_back(p.nc_original);
        np.push_back(p.nc_projected);
    }
    t.add_column("epoch", ep);
    t.add_column("layer", layer);
    t.add_column("entropy_original", ho);
    t.add_column("entropy_projected", hp);
    t.add_column("nc_original", no);
    t.add_column("nc_projected", np);
    t.write_csv(dir + "/linear_layers.csv");

    Table g;
    g.add_column("epoch", res.epochs);
    g.add_column("gap_original", res.gap_original);
    g.add_column("gap_projected", res.gap_projected);
    g.write_csv(dir + "/linear_gaps.csv");

    const int hidden = static_cast<int>(cfg.layer_sizes.size()) - 2;
    std::vector<PlotSeries> so, sp;
    for (int l = 1; l <= hidden; ++l) {
        PlotSeries a{"layer " + std::to_string(l), {}, {}};
        PlotSeries b = a;
        for (const auto& p : res.points)
            if (p.layer == l) {
                a.x.push_back(p.epoch);
                a.y.push_back(p.entropy_original);
                b.x.push_back(p.epoch);
                b.y.push_back(p.entropy_projected);
            }
        so.push_back(std::move(a));
        sp.push_back(std::move(b));
    }
    write_svg_plot(dir + "/linear_entropy_original.svg", "per-layer entropy, original space", so);
    write_svg_plot(dir + "/linear_entropy_projected.svg", "per-layer entropy, projected space", sp);
    write_svg_plot(dir + "/linear_gaps.svg", "inter-layer entropy gap",
                   {{"original", res.epochs, res.gap_original},
                    {"projected", res.epochs, res.gap_projected}});
}

void emit_groundtruth(const std::vector<GroundTruthRow>& rows, const GroundTruthConfig& cfg,
                      const std::string& dir) {
    fs::create_directories(dir);
    Json seeds = Json::array();
    for (auto s : cfg.seeds) seeds.push_back(s);
    Json j = report_envelope("ground-truth", Json{{"n", cfg.n},
                                                  {"d", cfg.d},
                                                  {"variances", cfg.variances},
                                                  {"seeds", seeds},
                                                  {"condition_cap", cfg.condition_cap},
                                                  {"sampler", kGaussianSamplerId}});
    Json jr = Json::array();
    Table t;
    std::vector<double> seed, var, ana, ro, rp, po, pp;
    for (const auto& r : rows) {
        jr.push_back({{"seed", r.seed},
                      {"variance", r.variance},
                      {"analytic", r.analytic},
                      {"raw_original", r.raw_original},
                      {"raw_projected", r.raw_projected},
                      {"post_original", r.post_original},
                      {"post_projected", r.post_projected}});
        seed.push_back(static_cast<double>(r.seed));
        var.push_back(r.variance);
        ana.push_back(r.analytic);
        ro.push_back(r.raw_original);
        rp.push_back(r.raw_projected);
        po.push_back(r.post_original);
        pp.push_back(r.post_projected);
    }
    j["rows"] = jr;
    write_json(j, dir + "/groundtruth_report.json");
    t.add_column("seed", seed);
    t.add_column("variance", var);
    t.add_column("analytic", ana);
    t.add_column("raw_original", ro);
    t.add_column("raw_projected", rp);
    t.add_column("post_original", po);
    t.add_column("post_projected", pp);
    t.write_csv(dir + "/groundtruth.csv");
    write_svg_plot(dir + "/groundtruth.svg", "post-network entropy vs variance",
                   {{"analytic", var, ana}, {"original", var, po}, {"projected", var, pp}});
}

void emit_ge(const GEResult& res, const GEConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    Json j = report_envelope("correlation-vs-generalization",
                             Json{{"activation", activation_name(cfg.activation)},
                                  {"epochs", cfg.epochs},
                                  {"record_every", cfg.record_every},
                                  {"learning_rate", cfg.learning_rate},
                                  {"batch_size", cfg.batch_size},
                                  {"seeds", cfg.seeds}});
    Json summary = Json::array();
    for (std::size_t a = 0; a < res.arch_names.size(); ++a)
        summary.push_back({{"architecture", res.arch_names[a]},
                           {"median_final_nc", res.median_final_nc[a]},
                           {"median_final_gap", res.median_final_gap[a]}});
    j["summary"] = summary;
    j["nc_gap_spearman"] = res.nc_gap_spearman;
    write_json(j, dir + "/ge_report.json");

    Table t;
    std::vector<double> arch_id, seed, ep, gap, nc, q1, q2, q3;
    std::map<std::string, std::size_t> arch_index;
    for (std::size_t a = 0; a < res.arch_names.size(); ++a) arch_index[res.arch_names[a]] = a;
    for (const auto& run : res.runs)
        for (const auto& p : run.curve) {
            arch_id.push_back(static_cast<double>(arch_index[run.architecture]));
            seed.push_back(static_cast<double>(run.seed));
            ep.push_back(p.epoch);
            gap.push_back(p.gap);
            nc.push_back(p.nc_penultimate);
            q1.push_back(p.wc_quartiles.q1);
            q2.push_back(p.wc_quartiles.q2);
            q3.push_back(p.wc_quartiles.q3);
        }
    t.add_column("arch_index", arch_id);
    t.add_column("seed", seed);
    t.add_column("epoch", ep);
    t.add_column("gap", gap);
    t.add_column("nc_penultimate", nc);
    t.add_column("wc_q1", q1);
    t.add_column("wc_q2", q2);
    t.add_column("wc_q3", q3);
    t.write_csv(dir + "/ge_curves.csv");

    std::vector<PlotSeries> nc_series, gap_series;
    for (const auto& run : res.runs) {
        if (run.seed != 0) continue;  // one representative curve per architecture
        PlotSeries a{run.architecture, {}, {}}, b{run.architecture, {}, {}};
        for (const auto& p : run.curve) {
            a.x.push_back(p.epoch);
            a.y.push_back(p.nc_penultimate);
            b.x.push_back(p.epoch);
            b.y.push_back(p.gap);
        }
        nc_series.push_back(std::move(a));
        gap_series.push_back(std::move(b));
    }
    write_svg_plot(dir + "/ge_nc.svg", "penultimate-layer NC", nc_series);
    write_svg_plot(dir + "/ge_gap.svg", "generalization gap", gap_series);
}

void emit_sweep(const std::vector<InitSweepCurve>& curves, const InitSweepConfig& cfg,
                const std::string& dir) {
    fs::create_directories(dir);
    Json j = report_envelope("initialization-sweep", Json{{"fixed_m", cfg.fixed_m},
                                                          {"fixed_n", cfg.fixed_n},
                                                          {"sweep", cfg.sweep},
                                                          {"seeds", cfg.seeds}});
    Json jc = Json::array();
    Table t;
    std::vector<PlotSeries> panel_m, panel_n;
    for (const auto& c : curves) {
        jc.push_back({{"init", init_flag_name(c.init)},
                      {"varying", c.varying_n ? "n" : "m"},
                      {"axis", c.axis},
                      {"mean_abs_wc", c.mean_abs_wc},
                      {"spearman", c.spearman_rho}});
        std::string name = std::string(init_flag_name(c.init)) + (c.varying_n ? "_vs_n" : "_vs_m");
        t.add_column(name + "_axis", c.axis);
        t.add_column(name + "_wc", c.mean_abs_wc);
        (c.varying_n ? panel_n : panel_m).push_back({init_flag_name(c.init), c.axis, c.mean_abs_wc});
    }
    j["curves"] = jc;
    write_json(j, dir + "/sweep_report.json");
    t.write_csv(dir + "/sweep.csv");
    write_svg_plot(dir + "/sweep_vs_m.svg", "mean |WC| vs m (n fixed)", panel_m);
    write_svg_plot(dir + "/sweep_vs_n.svg", "mean |WC| vs n (m fixed)", panel_n);
}

Dataset load_digits_split(const std::string& images, const std::string& labels, Eigen::Index subset) {
    Dataset ds = load_idx(images, labels);
    if (subset > 0 && subset < ds.size()) {
        Dataset cut;
        cut.source = ds.source;
        cut.inputs = ds.inputs.topRows(subset);
        cut.labels.assign(ds.labels.begin(), ds.labels.begin() + subset);
        return cut;
    }
    return ds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlation and kernel-embedding entropy measures for feed-forward networks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    bool as_json = false;
    app.add_flag("--json", as_json, "emit JSON instead of text");

    std::string input, labels_csv_flag, out_flag;

    // --- nc ---
    auto* nc_cmd = app.add_subcommand("nc", "neuronal correlation of an activation CSV");
    std::string nc_input;
    nc_cmd->add_option("--input", nc_input, "activation CSV (rows = samples)")->required();

    // --- wc ---
    auto* wc_cmd = app.add_subcommand("wc", "weight correlation of a weight-matrix CSV");
    std::string wc_input;
    bool wc_abs = false;
    wc_cmd->add_option("--input", wc_input, "weight CSV (columns = target neurons)")->required();
    wc_cmd->add_flag("--abs", wc_abs, "average |cosine| instead of signed cosine");

    // --- gamma ---
    auto* gamma_cmd = app.add_subcommand("gamma", "structure-correlation coefficient");
    std::vector<int> fc;
    std::vector<int> conv;
    double gamma_val = 1.0;
    gamma_cmd->add_option("--fully-connected", fc, "m n")->expected(2);
    gamma_cmd->add_option("--conv1d", conv, "input_len filter_width stride")->expected(3);
    gamma_cmd->add_option("--gamma", gamma_val, "gamma hyperparameter (default 1)");

    // --- entropy ---
    auto* ent_cmd = app.add_subcommand("entropy", "entropy of an activation CSV");
    std::string ent_input, space = "original", estimator = "knn", kind = "gaussian";
    int bins = 30, k = 3;
    double sigma = 0.0, beta = 0.5, width_factor = 100.0;
    bool select_width = false, with_labels = false;
    ent_cmd->add_option("--input", ent_input, "activation CSV")->required();
    ent_cmd->add_option("--space", space, "original|projected")
        ->check(CLI::IsMember({"original", "projected"}));
    ent_cmd->add_option("--estimator", estimator, "knn|binning")
        ->check(CLI::IsMember({"knn", "binning"}));
    ent_cmd->add_option("--kernel", kind, "gaussian|laplacian")
        ->check(CLI::IsMember({"gaussian", "laplacian"}));
    ent_cmd->add_option("--bins", bins, "histogram bins (binning estimator)");
    ent_cmd->add_option("--k", k, "neighbor count (knn estimator)");
    ent_cmd->add_option("--sigma", sigma, "kernel width (projected space)");
    ent_cmd->add_option("--width-factor", width_factor,
                        "sigma = factor x median pairwise distance when --sigma is absent");
    ent_cmd->add_flag("--select-width", select_width, "pick sigma by label alignment (needs labels)");
    ent_cmd->add_flag("--labels", with_labels, "input CSV carries a trailing label column");
    ent_cmd->add_option("--beta", beta, "width-selection tradeoff (default 0.5)");

    // --- experiment-linear ---
    auto* lin_cmd = app.add_subcommand("experiment-linear", "entropy invariance through an identity net");
    LinearInvarianceConfig lin_cfg;
    std::string structure = "64-20-20-20-20-20-10";
    std::string train_images = "data/digits/train-images-idx3-ubyte";
    std::string train_labels = "data/digits/train-labels-idx1-ubyte";
    std::string test_images = "data/digits/t10k-images-idx3-ubyte";
    std::string test_labels = "data/digits/t10k-labels-idx1-ubyte";
    Eigen::Index subset = 0;
    std::string lin_activation = "identity";
    lin_cmd->add_option("--structure", structure, "layer sizes, e.g. 64-20-20-20-20-20-10");
    lin_cmd->add_option("--activation", lin_activation)->check(CLI::IsMember({"identity"}));
    lin_cmd->add_option("--epochs", lin_cfg.epochs);
    lin_cmd->add_option("--record-every", lin_cfg.record_every);
    lin_cmd->add_option("--lr", lin_cfg.learning_rate);
    lin_cmd->add_option("--batch", lin_cfg.batch_size);
    lin_cmd->add_option("--seed", lin_cfg.seed);
    lin_cmd->add_option("--subset", subset, "training-subset size (0 = all)");
    lin_cmd->add_option("--gram-subsample", lin_cfg.gram_subsample);
    lin_cmd->add_option("--train-images", train_images);
    lin_cmd->add_option("--train-labels", train_labels);
    lin_cmd->add_option("--test-images", test_images);
    lin_cmd->add_option("--test-labels", test_labels);
    lin_cmd->add_option("--out", out_flag, "output directory (default $CENTROPY_OUT or .)");

    // --- experiment-groundtruth ---
    auto* gt_cmd = app.add_subcommand("experiment-groundtruth", "Gaussian ground-truth recovery");
    GroundTruthConfig gt_cfg;
    std::vector<std::uint64_t> gt_seeds{0, 1, 2};
    gt_cmd->add_option("--n", gt_cfg.n);
    gt_cmd->add_option("--d", gt_cfg.d);
    gt_cmd->add_option("--variances", gt_cfg.variances);
    gt_cmd->add_option("--seeds", gt_seeds);
    gt_cmd->add_option("--gram-subsample", gt_cfg.gram_subsample);
    gt_cmd->add_option("--out", out_flag);

    // --- experiment-ge ---
    auto* ge_cmd = app.add_subcommand("experiment-ge", "correlation vs generalization across depths");
    GEConfig ge_cfg;
    std::string ge_activation = "relu";
    int ge_full_scale = 0;
    Eigen::Index ge_subset = 1200;
    ge_cmd->add_option("--activation", ge_activation)->check(CLI::IsMember({"relu", "tanh", "identity"}));
    ge_cmd->add_option("--epochs", ge_cfg.epochs);
    ge_cmd->add_option("--record-every", ge_cfg.record_every);
    ge_cmd->add_option("--lr", ge_cfg.learning_rate);
    ge_cmd->add_option("--batch", ge_cfg.batch_size);
    ge_cmd->add_option("--seeds", ge_cfg.seeds);
    ge_cmd->add_option("--subset", ge_subset, "training-subset size (0 = all)");
    ge_cmd->add_flag("--full-scale", ge_full_scale, "full-length run (10x epochs)");
    ge_cmd->add_option("--train-images", train_images);
    ge_cmd->add_option("--train-labels", train_labels);
    ge_cmd->add_option("--test-images", test_images);
    ge_cmd->add_option("--test-labels", test_labels);
    ge_cmd->add_option("--out", out_flag);

    // --- sweep-init ---
    auto* sweep_cmd = app.add_subcommand("sweep-init", "|WC| at initialization vs layer sizes");
    InitSweepConfig sw_cfg;
    sweep_cmd->add_option("--fixed-m", sw_cfg.fixed_m);
    sweep_cmd->add_option("--fixed-n", sw_cfg.fixed_n);
    sweep_cmd->add_option("--sweep", sw_cfg.sweep);
    sweep_cmd->add_option("--seeds", sw_cfg.seeds);
    sweep_cmd->add_option("--out", out_flag);

    for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*nc_cmd) {
            print_report(neuronal_correlation(load_activations(nc_input)), "NC", as_json);
        } else if (*wc_cmd) {
            Dataset ds = load_csv(wc_input, false);
            WeightMatrix W;
            W.values = ds.inputs;
            print_report(weight_correlation(W, wc_abs), wc_abs ? "|WC|" : "WC", as_json);
        } else if (*gamma_cmd) {
            ConnectivityPattern pattern;
            if (!fc.empty())
                pattern = ConnectivityPattern::fully_connected(fc[0], fc[1], gamma_val);
            else if (!conv.empty())
                pattern = ConnectivityPattern::conv1d(conv[0], conv[1], conv[2], gamma_val);
            else
                throw ParameterError("gamma: need --fully-connected or --conv1d");
            print_report(structure_correlation_coefficient(pattern), "Gamma", as_json);
        } else if (*ent_cmd) {
            Dataset ds = load_csv(ent_input, with_labels);
            ActivationMatrix T{ds.inputs, 0, 0};
            EstimatorConfig ec;
            ec.kind = estimator == "knn" ? Estimator::KNN : Estimator::Binning;
            ec.bins = bins;
            ec.k = k;
            KernelKind kk = kind == "gaussian" ? KernelKind::Gaussian : KernelKind::Laplacian;
            Json j;
            if (space == "original") {
                j = estimate_to_json(entropy_original(T, ec));
            } else {
                KernelEmbedConfig kc;
                kc.kind = kk;
                kc.width_factor = width_factor;
                if (select_width) {
                    if (!ds.labeled())
                        throw ParameterError("entropy: --select-width needs a labeled CSV (--labels)");
                    WidthSelection sel =
                        select_kernel_width(T, ds.labels, beta, default_width_grid(T.values), kk);
                    kc.sigma = sel.sigma;
                    j["width_selection"] = {{"sigma", sel.sigma},
                                            {"alignment", sel.alignment},
                                            {"dimensional_correlation", sel.dim_correlation},
                                            {"objective", sel.objective},
                                            {"beta", beta}};
                    Json grid = Json::array();
                    for (const auto& c : sel.grid)
                        grid.push_back({{"sigma", c.sigma},
                                        {"alignment", c.alignment},
                                        {"dimensional_correlation", c.dim_correlation},
                                        {"objective", c.objective}});
                    j["width_selection"]["grid"] = grid;
                } else if (sigma > 0.0) {
                    kc.sigma = sigma;
                }
                j.update(estimate_to_json(entropy_kernel_embedding(T, kc, ec)));
            }
            if (as_json) {
                std::cout << j.dump(2) << '\n';
            } else {
                std::cout << "entropy (" << space << ", " << estimator
                          << ") = " << j["value_nats"].get<double>() << " nats\n";
                if (j.contains("retained_rank"))
                    std::cout << "retained rank " << j["retained_rank"].get<long>() << ", sigma "
                              << j["sigma"].get<double>() << ", dimensional correlation "
                              << j["dimensional_correlation"].get<double>() << '\n';
                if (j.contains("width_selection"))
                    std::cout << "selected sigma " << j["width_selection"]["sigma"].get<double>()
                              << " over a " << j["width_selection"]["grid"].size() << "-point grid\n";
            }
        } else if (*lin_cmd) {
            lin_cfg.layer_sizes = NetworkSpec::parse_structure(structure);
            Dataset tr = load_digits_split(train_images, train_labels, subset);
            Dataset te = load_idx(test_images, test_labels);
            LinearInvarianceResult res = run_linear_invariance(tr, te, lin_cfg);
            emit_linear(res, lin_cfg, output_dir(out_flag));
            std::cout << "median inter-layer gap: original " << res.median_gap_original
                      << ", projected " << res.median_gap_projected << "\nmedian NC: original "
                      << res.median_nc_original << ", projected " << res.median_nc_projected << '\n';
        } else if (*gt_cmd) {
            gt_cfg.seeds = gt_seeds;
            std::vector<GroundTruthRow> rows = run_ground_truth(gt_cfg);
            emit_groundtruth(rows, gt_cfg, output_dir(out_flag));
            for (const auto& r : rows)
                std::cout << "seed " << r.seed << " var " << r.variance << ": analytic " << r.analytic
                          << ", post original " << r.post_original << ", post projected "
                          << r.post_projected << '\n';
        } else if (*ge_cmd) {
            ge_cfg.activation = ge_activation == "relu"   ? Activation::ReLU
                                : ge_activation == "tanh" ? Activation::Tanh
                                                          : Activation::Identity;
            if (ge_full_scale) ge_cfg.epochs *= 10;
            Dataset tr = load_digits_split(train_images, train_labels, ge_subset);
            Dataset te = load_idx(test_images, test_labels);
            ge_cfg.architectures = default_ge_architectures(tr.dim(), 10);
            GEResult res = run_generalization_experiment(tr, te, ge_cfg);
            emit_ge(res, ge_cfg, output_dir(out_flag));
            for (std::size_t a = 0; a < res.arch_names.size(); ++a)
                std::cout << res.arch_names[a] << ": final NC " << res.median_final_nc[a]
                          << ", final gap " << res.median_final_gap[a] << '\n';
            std::cout << "NC-gap Spearman: " << res.nc_gap_spearman << '\n';
        } else if (*sweep_cmd) {
            std::vector<InitSweepCurve> curves = run_init_sweep(sw_cfg);
            emit_sweep(curves, sw_cfg, output_dir(out_flag));
            for (const auto& c : curves)
                std::cout << init_flag_name(c.init) << " vs " << (c.varying_n ? 'n' : 'm')
                          << ": Spearman " << c.spearman_rho << '\n';
        }
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DegenerateInputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
