#include "mdsplus/errors.hpp"
#include "mdsplus/spike_model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace mdsplus;

namespace {

// Optimal hard thresholds at sigma = 1 as tabulated for beta = 0.05, 0.10, ..., 1.00.
constexpr std::array<double, 20> kTabulatedThreshold = {
    1.301, 1.393, 1.467, 1.531, 1.588, 1.639, 1.688, 1.733, 1.775, 1.816,
    1.854, 1.891, 1.927, 1.962, 1.995, 2.028, 2.059, 2.09,  2.12,  2.149};

// Frozen from the geometric expansion x^2 + y^2 - 2 x y c(x) (mpmath, 30 digits).
constexpr double kMdsLossX2 = 1.5897459621556135;

const SpikeParams kUnit(1.0, 1.0);

}  // namespace

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(SpikeParams(0.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(SpikeParams(1.0, -1.0), PreconditionError);
    CHECK_THROWS_AS(SignalSpectrum({1.0, 2.0}), PreconditionError);
    CHECK_THROWS_AS(SignalSpectrum({1.0, 1.0}), PreconditionError);
    CHECK_THROWS_AS(SignalSpectrum({0.0}), PreconditionError);
    CHECK_NOTHROW(SignalSpectrum({}));
}

TEST_CASE("bulk_edge") {
    CHECK(bulk_edge(kUnit) == doctest::Approx(2.0));
    CHECK(bulk_edge(SpikeParams(0.25, 2.0)) == doctest::Approx(3.0));
    CHECK(bulk_edge(SpikeParams(4.0, 1.0)) == doctest::Approx(3.0));
}

TEST_CASE("y_of_x") {
    for (double beta : {0.1, 0.5, 1.0, 2.0}) {
        const SpikeParams params(beta, 1.7);
        CHECK(y_of_x(detection_threshold(params), params) == doctest::Approx(bulk_edge(params)).epsilon(1e-12));
    }
    CHECK(y_of_x(2.0, kUnit) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(y_of_x(1.0, SpikeParams(0.25, 1.0)) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-14));
    CHECK_THROWS_AS(y_of_x(0.9, kUnit), DomainError);
}

TEST_CASE("c_of_x") {
    CHECK(c_of_x(1.0, kUnit) == doctest::Approx(0.0));
    CHECK(c_of_x(2.0, kUnit) == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
    CHECK(c_of_x(100.0, kUnit) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK_THROWS_AS(c_of_x(0.5, kUnit), DomainError);
}

TEST_CASE("x_of_y") {
    const SpikeParams quarter(0.25, 1.0);
    CHECK(x_of_y(bulk_edge(quarter), quarter) == doctest::Approx(std::pow(0.25, 0.25)).epsilon(1e-12));
    CHECK(x_of_y(2.5, kUnit) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(std::abs(x_of_y(1.58114, quarter) - 1.0) <= 1e-5);
    CHECK_THROWS_AS(x_of_y(1.99, kUnit), DomainError);
}

TEST_CASE("x_of_y inverts y_of_x on a grid") {
    for (double beta : {0.1, 0.5, 1.0, 2.0}) {
        for (double sigma : {0.3, 1.0, 4.0}) {
            const SpikeParams params(beta, sigma);
            for (double factor : {1.01, 1.5, 2.0, 5.0, 20.0}) {
                const double x = factor * detection_threshold(params);
                CHECK(std::abs(x_of_y(y_of_x(x, params), params) - x) <= 1e-10 * x);
            }
        }
    }
}

TEST_CASE("optimal_shrinker examples") {
    CHECK(optimal_shrinker(2.0, kUnit) == 0.0);
    CHECK(optimal_shrinker(1.0, kUnit) == 0.0);
    CHECK(optimal_shrinker(0.0, kUnit) == 0.0);
    CHECK(optimal_shrinker(2.5, kUnit) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(optimal_shrinker(std::sqrt(2.5), SpikeParams(0.25, 1.0)) ==
          doctest::Approx(std::sqrt(0.6)).epsilon(1e-13));
    CHECK_THROWS_AS(optimal_shrinker(-1.0, kUnit), PreconditionError);
}

TEST_CASE("optimal_shrinker equals x(y) c(x(y)) and shrinks") {
    for (double beta : {0.05, 0.3, 1.0, 2.0, 4.0}) {
        for (double sigma : {0.5, 1.0, 3.0}) {
            const SpikeParams params(beta, sigma);
            const double edge = bulk_edge(params);
            double previous = 0.0;
            for (int k = 0; k <= 400; ++k) {
                const double y = edge * (0.5 + 0.01 * k);
                const double eta = optimal_shrinker(y, params);
                CHECK(eta <= y);
                CHECK(eta >= previous - 1e-12);
                previous = eta;
                if (y > edge) {
                    const double x = x_of_y(y, params);
                    CHECK(eta == doctest::Approx(x * c_of_x(x, params)).epsilon(1e-10));
                }
            }
            // Continuity at the bulk edge.
            // The shrinker vanishes like the fourth root of the distance to the edge.
            CHECK(optimal_shrinker(edge * (1.0 + 1e-12), params) <= 4e-3 * sigma);
        }
    }
}

TEST_CASE("optimal_hard_threshold reproduces the tabulated values") {
    for (std::size_t i = 0; i < kTabulatedThreshold.size(); ++i) {
        const double beta = 0.05 * static_cast<double>(i + 1);
        CHECK(std::abs(optimal_hard_threshold(SpikeParams(beta, 1.0)) - kTabulatedThreshold[i]) <= 1e-3);
    }
    CHECK(std::abs(optimal_hard_threshold(SpikeParams(0.5, 2.0)) - 3.632) <= 2e-3);
}

TEST_CASE("optimal_hard_threshold properties") {
    for (double beta : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 2.0, 4.0}) {
        const SpikeParams params(beta, 1.0);
        const double lambda = optimal_hard_threshold(params);
        CHECK(lambda > bulk_edge(params));
        const double a = threshold_cubic_root(beta);
        CHECK(a > std::sqrt(beta));
        CHECK(std::abs(threshold_cubic(a, beta)) <= 1e-9 * std::pow(1.0 + beta, 3));
        for (double c : {0.01, 0.5, 3.0, 1000.0}) {
            CHECK(std::abs(optimal_hard_threshold(SpikeParams(beta, c)) - c * lambda) <= 1e-12 * c * lambda);
        }
    }
}

TEST_CASE("optimal_embedding_dim") {
    CHECK(optimal_embedding_dim({9.0, 1.0, 0.5}, kUnit) == 1);
    CHECK(optimal_embedding_dim({0.0, 0.0, 0.0}, kUnit) == 0);
    CHECK(optimal_embedding_dim({4.0, 1e-3, 1e-9, 0.0, -1e-3}, SpikeParams(1.0, 1e-8)) == 3);
}

TEST_CASE("mds_asymptotic_loss examples") {
    CHECK(mds_asymptotic_loss(SignalSpectrum({2.0}), 1, kUnit) == doctest::Approx(kMdsLossX2).epsilon(1e-12));
    CHECK(mds_asymptotic_loss(SignalSpectrum({0.5}), 1, kUnit) == doctest::Approx(4.25).epsilon(1e-14));
    CHECK(mds_asymptotic_loss(SignalSpectrum({2.0}), 0, kUnit) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("mds_asymptotic_loss agrees with the geometric expansion") {
    for (double beta : {0.2, 0.7, 1.0, 3.0}) {
        for (double sigma : {0.5, 2.0}) {
            const SpikeParams params(beta, sigma);
            const double thr = detection_threshold(params);
            const SignalSpectrum spectrum({6.0 * thr, 2.0 * thr, 1.1 * thr, 0.6 * thr});
            const double edge2 = std::pow(bulk_edge(params), 2);
            for (std::size_t r = 0; r <= 6; ++r) {
                double expected = 0.0;
                for (std::size_t i = 0; i < 4; ++i) {
                    const double x = spectrum.values()[i];
                    expected += (i < 3 && i < r) ? oracle::kept_spike_loss(x, beta, sigma) : x * x;
                }
                if (r > 3) expected += static_cast<double>(r - 3) * edge2;
                CHECK(mds_asymptotic_loss(spectrum, r, params) == doctest::Approx(expected).epsilon(1e-10));
            }
            double shrunk = std::pow(spectrum.values()[3], 2);
            for (std::size_t i = 0; i < 3; ++i) shrunk += oracle::shrunk_spike_loss(spectrum.values()[i], beta, sigma);
            CHECK(mdsplus_asymptotic_loss(spectrum, params) == doctest::Approx(shrunk).epsilon(1e-10));
        }
    }
}

TEST_CASE("mdsplus_asymptotic_loss examples") {
    CHECK(mdsplus_asymptotic_loss(SignalSpectrum({2.0}), kUnit) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(mdsplus_asymptotic_loss(SignalSpectrum({0.5}), kUnit) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(mdsplus_asymptotic_loss(SignalSpectrum({2.0, 0.5}), kUnit) == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("regret examples") {
    CHECK(regret(SignalSpectrum({2.0}), 1, kUnit) == doctest::Approx(kMdsLossX2 - 1.0).epsilon(1e-12));
    CHECK(regret(SignalSpectrum({2.0}), 0, kUnit) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(regret(SignalSpectrum({0.5}), 1, kUnit) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("regret is nonnegative and equals the loss difference") {
    for (int i = 0; i < 20; ++i) {
        const double beta = 0.05 + 0.2 * i;  // 0.05 .. 3.85, both sides of 1
        for (int j = 0; j < 20; ++j) {
            const double x = 0.1 + 0.25 * j;
            for (double sigma : {1.0, 2.5}) {
                const SpikeParams params(beta, sigma);
                const SignalSpectrum spectrum({x * sigma});
                for (std::size_t r : {0u, 1u, 2u}) {
                    const double value = regret(spectrum, r, params);
                    CHECK(value >= 0.0);
                    const double diff = mds_asymptotic_loss(spectrum, r, params) - mdsplus_asymptotic_loss(spectrum, params);
                    CHECK(std::abs(value - diff) <= 1e-9 * (1.0 + std::abs(diff)));
                }
            }
        }
    }
}
