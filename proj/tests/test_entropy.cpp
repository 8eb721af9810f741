#include <doctest.h>

#include <random>

#include "centropy/data.hpp"
#include "centropy/entropy.hpp"

using namespace centropy;

namespace {

const double kGaussian1dEntropy = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);

Vector gaussian_column(Eigen::Index n, std::uint64_t seed, double variance = 1.0) {
    return sample_gaussian(n, 1, variance, seed).inputs.col(0);
}

}  // namespace

TEST_CASE("binned entropy") {
    SUBCASE("constant input") {
        CHECK(binned_entropy_1d(Vector::Constant(50, 3.0), 30) == doctest::Approx(0.0));
    }
    SUBCASE("uniform fill of 2^k bins") {
        int bins = 16;
        Vector x(bins);
        for (int i = 0; i < bins; ++i) x[i] = i;
        CHECK(binned_entropy_1d(x, bins) == doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-9));
    }
    SUBCASE("quantized gaussian oracle") {
        // Discrete entropy of a finely quantized continuous variable is
        // approximately the differential entropy minus log of the bin width.
        Vector x = gaussian_column(100000, 13);
        double delta = (x.maxCoeff() - x.minCoeff()) / 30.0;
        double expected = kGaussian1dEntropy - std::log(delta);
        CHECK(binned_entropy_1d(x, 30) == doctest::Approx(expected).epsilon(0.05 / expected));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS((void)binned_entropy_1d(Vector::Zero(5), 1), ParameterError);
        CHECK_THROWS_AS((void)binned_entropy_1d(Vector::Zero(1), 10), ParameterError);
    }
}

TEST_CASE("digamma and unit ball volume") {
    CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-10));
    CHECK(digamma(0.5) == doctest::Approx(-1.9635100260214235).epsilon(1e-10));
    CHECK(digamma(10.0) == doctest::Approx(2.2517525890667211).epsilon(1e-10));
    CHECK(unit_ball_log_volume(1) == doctest::Approx(std::log(2.0)));
    CHECK(unit_ball_log_volume(2) == doctest::Approx(std::log(std::numbers::pi)));
    CHECK(unit_ball_log_volume(3) == doctest::Approx(std::log(4.0 * std::numbers::pi / 3.0)));
}

TEST_CASE("knn entropy") {
    SUBCASE("1-D standard gaussian") {
        Matrix X = sample_gaussian(10000, 1, 1.0, 4).inputs;
        CHECK(knn_entropy(X, 3) == doctest::Approx(kGaussian1dEntropy).epsilon(0.05));
    }
    SUBCASE("1-D uniform(0,1) has zero entropy") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Matrix X(10000, 1);
        for (Eigen::Index i = 0; i < X.rows(); ++i) X(i, 0) = u(rng);
        CHECK(std::abs(knn_entropy(X, 3)) < 0.05);
    }
    SUBCASE("scaling law: H(cX) = H(X) + ln c") {
        Matrix X = sample_gaussian(5000, 1, 1.0, 8).inputs;
        double h = knn_entropy(X, 3);
        CHECK(knn_entropy((4.0 * X).eval(), 3) == doctest::Approx(h + std::log(4.0)).epsilon(0.02));
    }
    SUBCASE("multivariate gaussian") {
        Matrix X = sample_gaussian(4000, 3, 1.0, 9).inputs;
        CHECK(knn_entropy(X, 3) == doctest::Approx(3.0 * kGaussian1dEntropy).epsilon(0.05));
    }
    SUBCASE("duplicates survive via jitter") {
        Matrix X(6, 1);
        X << 1, 1, 2, 2, 3, 3;
        double h = knn_entropy(X, 2, 5);
        CHECK(std::isfinite(h));
        CHECK(knn_entropy(X, 2, 5) == h);  // deterministic under a fixed seed
    }
    SUBCASE("1-D fast path agrees with brute force") {
        Matrix X = sample_gaussian(500, 1, 1.0, 10).inputs;
        Matrix X2(500, 2);  // embed in 2-D with a zero column: same neighbor structure
        X2.col(0) = X.col(0);
        X2.col(1).setZero();
        auto e1 = detail::knn_distances(X, 3);
        auto e2 = detail::knn_distances(X2, 3);
        for (std::size_t i = 0; i < e1.size(); ++i) CHECK(e1[i] == doctest::Approx(e2[i]));
    }
    SUBCASE("errors") {
        Matrix X = sample_gaussian(4, 1, 1.0, 1).inputs;
        CHECK_THROWS_AS((void)knn_entropy(X, 0), ParameterError);
        CHECK_THROWS_AS((void)knn_entropy(X, 4), ParameterError);
    }
}

TEST_CASE("estimator consistency improves with sample size") {
    for (Estimator kind : {Estimator::KNN}) {
        std::vector<double> err_small, err_big;
        for (std::uint64_t s = 0; s < 20; ++s) {
            EstimatorConfig cfg;
            cfg.kind = kind;
            err_small.push_back(std::abs(
                estimate_1d(gaussian_column(100, 40 + s), cfg) - kGaussian1dEntropy));
            err_big.push_back(std::abs(
                estimate_1d(gaussian_column(10000, 70 + s), cfg) - kGaussian1dEntropy));
        }
        std::sort(err_small.begin(), err_small.end());
        std::sort(err_big.begin(), err_big.end());
        CHECK(err_big[10] < err_small[10]);
    }
}

TEST_CASE("original-space entropy (independence bound)") {
    EstimatorConfig cfg;  // knn defaults
    SUBCASE("independent dimensions: bound is tight") {
        ActivationMatrix T{sample_gaussian(5000, 4, 1.0, 14).inputs, 0, 0};
        EntropyEstimate est = entropy_original(T, cfg);
        CHECK(est.per_dimension.size() == 4);
        CHECK(est.value == doctest::Approx(4.0 * kGaussian1dEntropy).epsilon(0.02));
        double sum = 0;
        for (double h : est.per_dimension) sum += h;
        CHECK(est.value == doctest::Approx(sum));
    }
    SUBCASE("duplicated neuron doubles the estimate") {
        Vector x = gaussian_column(3000, 15);
        ActivationMatrix T;
        T.values.resize(3000, 2);
        T.values.col(0) = x;
        T.values.col(1) = x;
        EntropyEstimate est = entropy_original(T, cfg);
        CHECK(est.value == doctest::Approx(2.0 * kGaussian1dEntropy).epsilon(0.05));
    }
    SUBCASE("correlated gaussian: bound exceeds the joint entropy") {
        // 5-D with pairwise correlation 0.9 via Cholesky of the target covariance
        Eigen::Index d = 5, s = 5000;
        Matrix sigma = Matrix::Constant(d, d, 0.9);
        sigma.diagonal().setOnes();
        Matrix L = Eigen::LLT<Matrix>(sigma).matrixL();
        ActivationMatrix T{sample_gaussian(s, d, 1.0, 16).inputs * L.transpose(), 0, 0};
        GaussianSpec spec{d, sigma, Vector::Zero(d)};
        double joint = gaussian_entropy_analytic(spec);
        EntropyEstimate est = entropy_original(T, cfg);
        CHECK(est.value > joint + 0.5);
        CHECK(est.value > joint - 0.1);  // dominance up to estimator noise
    }
}

TEST_CASE("kernel-embedding entropy") {
    EstimatorConfig ec;  // knn defaults
    KernelEmbedConfig kc;
    SUBCASE("degenerate input rejected") {
        ActivationMatrix T;
        T.values = Matrix::Ones(20, 3);
        CHECK_THROWS_AS((void)entropy_kernel_embedding(T, kc, ec), DegenerateInputError);
    }
    SUBCASE("recovers the analytic value on an independent gaussian") {
        ActivationMatrix T{sample_gaussian(5000, 5, 1.0, 17).inputs, 0, 0};
        double analytic = 5.0 * kGaussian1dEntropy;  // 7.0947
        EntropyEstimate est = entropy_kernel_embedding(T, kc, ec);
        CHECK(std::abs(est.value - analytic) / analytic < 0.10);
        CHECK(est.retained_rank >= 5);
        CHECK(est.space == Space::Projected);
        CHECK(est.sigma_used > 0.0);
        CHECK(est.eigenvalue_mass > 0.0);
    }
    SUBCASE("both spaces agree on independent data") {
        ActivationMatrix T{sample_gaussian(3000, 3, 1.0, 18).inputs, 0, 0};
        double orig = entropy_original(T, ec).value;
        double proj = entropy_kernel_embedding(T, kc, ec).value;
        CHECK(std::abs(proj - orig) / std::abs(orig) < 0.10);
    }
    SUBCASE("duplicated column: original overestimates, projected does not") {
        Vector x = gaussian_column(2000, 19);
        ActivationMatrix T;
        T.values.resize(2000, 2);
        T.values.col(0) = x;
        T.values.col(1) = x;
        double orig = entropy_original(T, ec).value;   // ~ 2 x single-neuron entropy
        double proj = entropy_kernel_embedding(T, kc, ec).value;
        CHECK(orig > proj + 0.5);
        CHECK(proj == doctest::Approx(kGaussian1dEntropy + 0.5 * std::log(2.0)).epsilon(0.15));
    }
    SUBCASE("decorrelation: feature dimensions less correlated than raw neurons") {
        Matrix sigma = Matrix::Constant(4, 4, 0.9);
        sigma.diagonal().setOnes();
        Matrix L = Eigen::LLT<Matrix>(sigma).matrixL();
        ActivationMatrix T{sample_gaussian(800, 4, 1.0, 20).inputs * L.transpose(), 0, 0};
        EntropyEstimate est = entropy_kernel_embedding(T, kc, ec);
        CHECK(est.retained_dim_correlation < neuronal_correlation(T).value);
    }
    SUBCASE("deterministic") {
        ActivationMatrix T{sample_gaussian(400, 3, 1.0, 21).inputs, 0, 0};
        EntropyEstimate a = entropy_kernel_embedding(T, kc, ec);
        EntropyEstimate b = entropy_kernel_embedding(T, kc, ec);
        CHECK(a.value == b.value);
        CHECK(a.retained_rank == b.retained_rank);
    }
    SUBCASE("explicit sigma respected; binning needs no scale correction") {
        ActivationMatrix T{sample_gaussian(500, 2, 1.0, 22).inputs, 0, 0};
        KernelEmbedConfig fixed = kc;
        fixed.sigma = 123.0;
        EntropyEstimate est = entropy_kernel_embedding(T, fixed, ec);
        CHECK(est.sigma_used == doctest::Approx(123.0));
        EstimatorConfig binning;
        binning.kind = Estimator::Binning;
        EntropyEstimate bn = entropy_kernel_embedding(T, fixed, binning);
        for (double h : bn.per_dimension) CHECK(h >= 0.0);
        CHECK_THROWS_AS((void)entropy_kernel_embedding(
                            T, [&] { auto c = kc; c.sigma = -1.0; return c; }(), ec),
                        ParameterError);
    }
    SUBCASE("subsampling cap honored") {
        KernelEmbedConfig capped = kc;
        capped.max_gram_samples = 100;
        ActivationMatrix T{sample_gaussian(1000, 2, 1.0, 23).inputs, 0, 0};
        EntropyEstimate est = entropy_kernel_embedding(T, capped, ec);
        CHECK(std::isfinite(est.value));
    }
}

TEST_CASE("analytic gaussian entropy") {
    GaussianSpec spec;
    spec.dimension = 1;
    spec.covariance = Matrix::Identity(1, 1);
    spec.mean = Vector::Zero(1);
    CHECK(gaussian_entropy_analytic(spec) == doctest::Approx(1.41894).epsilon(1e-5));

    spec.dimension = 5;
    spec.covariance = Matrix::Identity(5, 5);
    spec.mean = Vector::Zero(5);
    CHECK(gaussian_entropy_analytic(spec) == doctest::Approx(7.0947).epsilon(1e-4));

    spec.covariance = 0.3 * Matrix::Identity(5, 5);
    CHECK(gaussian_entropy_analytic(spec) == doctest::Approx(4.0849).epsilon(1e-4));
    spec.covariance = 0.7 * Matrix::Identity(5, 5);
    CHECK(gaussian_entropy_analytic(spec) == doctest::Approx(6.2033).epsilon(1e-4));

    spec.covariance = Matrix::Zero(5, 5);
    CHECK_THROWS_AS((void)gaussian_entropy_analytic(spec), ParameterError);
    spec.covariance = Matrix::Identity(4, 4);
    CHECK_THROWS_AS((void)gaussian_entropy_analytic(spec), ParameterError);
}
