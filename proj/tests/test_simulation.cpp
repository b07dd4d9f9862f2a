#include "mdsplus/errors.hpp"
#include "mdsplus/mds.hpp"
#include "mdsplus/procrustes.hpp"
#include "mdsplus/simulation.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace mdsplus;

namespace {

SpikedConfig small_config(double sigma) {
    SpikedConfig config;
    config.n = 60;
    config.p = 80;
    config.spectrum = SignalSpectrum({3.0, 2.0, 1.5});
    config.sigma = sigma;
    config.seed = 12345;
    return config;
}

}  // namespace

TEST_CASE("spiked dataset construction") {
    const SpikedConfig config = small_config(0.5);
    const Dataset data = generate_spiked_dataset(config);
    CHECK(data.x.rows() == 60);
    CHECK(data.x.cols() == 3);
    CHECK(data.y.cols() == 80);
    CHECK((center_rows(data.x) - data.x).norm() <= 1e-10 * data.x.norm());
    const Vector sv = svd(data.x).values;
    CHECK(std::abs(sv(0) - 3.0) <= 1e-9);
    CHECK(std::abs(sv(1) - 2.0) <= 1e-9);
    CHECK(std::abs(sv(2) - 1.5) <= 1e-9);

    // Same seed, same data.
    CHECK(generate_spiked_dataset(config).y == data.y);
}

TEST_CASE("noiseless spiked data is an isometric copy") {
    const Dataset data = generate_spiked_dataset(small_config(0.0));
    const Matrix dy = oracle::brute_sq_distances(data.y);
    const Matrix dx = oracle::brute_sq_distances(data.x);
    CHECK((dy - dx).norm() <= 1e-12 * dx.norm());
}

TEST_CASE("spiked config validation") {
    SpikedConfig config = small_config(1.0);
    config.n = 3;
    CHECK_THROWS_AS(generate_spiked_dataset(config), PreconditionError);
    config = small_config(1.0);
    config.p = 2;
    CHECK_THROWS_AS(generate_spiked_dataset(config), PreconditionError);
    config = small_config(-1.0);
    CHECK_THROWS_AS(generate_spiked_dataset(config), PreconditionError);
}

TEST_CASE("noise has variance sigma^2 / p") {
    SpikedConfig config;
    config.n = 400;
    config.p = 300;
    config.sigma = 2.0;
    config.seed = 5;
    const Dataset data = generate_spiked_dataset(config);
    const double variance = data.y.squaredNorm() / static_cast<double>(data.y.size());
    CHECK(variance == doctest::Approx(4.0 / 300.0).epsilon(0.01));
}

TEST_CASE("random orthonormal rows") {
    Rng rng(3);
    const Matrix w = random_orthonormal_rows(4, 50, rng);
    CHECK((w * w.transpose() - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix q = haar_orthogonal(6, rng);
    CHECK((q * q.transpose() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK_THROWS_AS(random_orthonormal_rows(5, 4, rng), PreconditionError);
}

TEST_CASE("helix generator") {
    HelixConfig config;
    config.n = 50;
    config.p = 3;
    config.random_rotation = false;
    const Dataset data = generate_helix(config);
    CHECK((data.y - data.x).norm() == 0.0);
    CHECK((center_rows(data.x) - data.x).norm() <= 1e-12);

    HelixConfig default_shape;
    default_shape.seed = 1;
    const Dataset big = generate_helix(default_shape);
    CHECK(big.y.rows() == 300);
    CHECK(big.y.cols() == 500);

    HelixConfig other = default_shape;
    other.seed = 99;
    const Matrix d1 = pairwise_sq_distances(big.y).values();
    const Matrix d2 = pairwise_sq_distances(generate_helix(other).y).values();
    CHECK((d1 - d2).norm() <= 1e-10 * d1.norm());

    config.p = 2;
    CHECK_THROWS_AS(generate_helix(config), PreconditionError);
}

TEST_CASE("noiseless experiment recovers X exactly") {
    const ExperimentReport report =
        run_experiment(small_config(0.0), 2, {SimMethod::classical, SimMethod::svht, SimMethod::mds_plus}, 3);
    REQUIRE(report.records.size() == 2);
    for (const auto& rec : report.records) {
        CHECK(*rec.empirical_loss_mds < 1e-10);
        CHECK(*rec.empirical_loss_svht < 1e-10);
        CHECK(*rec.empirical_loss_mdsplus < 1e-10);
        CHECK(rec.rhat == 3);
    }
    CHECK_FALSE(report.theory.has_value());
}

TEST_CASE("experiment reports are deterministic and independent of worker count") {
    const SpikedConfig config = small_config(0.7);
    const std::vector<SimMethod> methods{SimMethod::classical, SimMethod::mds_plus};
    const auto one = to_json(run_experiment(config, 4, methods, 2, 1)).dump();
    const auto many = to_json(run_experiment(config, 4, methods, 2, 3)).dump();
    CHECK(one == many);
    SpikedConfig other = config;
    other.seed += 1;
    CHECK(to_json(run_experiment(other, 4, methods, 2, 1)).dump() != one);
}

TEST_CASE("aggregates recompute from trial records") {
    const ExperimentReport report = run_experiment(small_config(0.7), 5, {SimMethod::classical, SimMethod::svht}, 2);
    std::vector<double> losses;
    for (const auto& rec : report.records) {
        losses.push_back(*rec.empirical_loss_mds);
        CHECK_FALSE(rec.empirical_loss_mdsplus.has_value());
        CHECK(rec.sigma_hat.has_value());
        CHECK(rec.top_singular_values.size() == 6);
    }
    const LossSummary s = summarize(losses);
    CHECK(report.mds->mean == s.mean);
    CHECK(report.mds->standard_error == s.standard_error);
    CHECK_FALSE(report.mdsplus.has_value());

    const auto doc = to_json(report);
    CHECK(doc["trials"].size() == 5);
    CHECK(doc["aggregates"]["mdsplus"].is_null());
    CHECK(doc["theory"]["lambda_star"].get<double>() > doc["theory"]["bulk_edge"].get<double>());
    CHECK(doc["config"]["beta"].get<double>() == doctest::Approx(59.0 / 80.0));

    const std::string csv = trials_csv(report);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("summarize") {
    const LossSummary s = summarize({1.0, 2.0, 3.0, 4.0});
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.standard_deviation == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(s.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(summarize({7.0}).standard_error == 0.0);
}

TEST_CASE("trial seeds are distinct") {
    CHECK(trial_seed(1, 0) != trial_seed(1, 1));
    CHECK(trial_seed(1, 0) != trial_seed(2, 0));
    CHECK(trial_seed(5, 9) == trial_seed(5, 9));
}
