#pragma once

#include "mdsplus/matrix.hpp"
#include "mdsplus/spike_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mdsplus {

using Rng = std::mt19937_64;

/// Seed of the RNG stream owned by one trial; a pure function of (master, trial).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial);

/// k x p matrix with orthonormal rows, distributed as the first k rows of a
/// Haar-random orthogonal p x p matrix.
Matrix random_orthonormal_rows(Eigen::Index k, Eigen::Index p, Rng& rng);

/// Haar-random orthogonal p x p matrix.
Matrix haar_orthogonal(Eigen::Index p, Rng& rng);

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng);

struct SpikedConfig {
    std::size_t n = 0;
    std::size_t p = 0;
    SignalSpectrum spectrum{{}};
    double sigma = 0.0;
    std::uint64_t seed = 0;

    /// Throws PreconditionError unless n >= 2, p >= 1, d < n, d <= p and sigma >= 0.
    void validate() const;
    double beta() const { return static_cast<double>(n - 1) / static_cast<double>(p); }
};

struct Dataset {
    Matrix x;  // n x d clean, centered configuration
    Matrix y;  // n x p observations
};

/// X centered with singular values exactly the spectrum; Y = [X, 0] R + Z with
/// Haar R and Z_ij ~ N(0, sigma^2 / p).
Dataset generate_spiked_dataset(const SpikedConfig& config);
Dataset generate_spiked_dataset(const SpikedConfig& config, Rng& rng);

struct HelixConfig {
    std::size_t n = 300;
    std::size_t p = 500;
    double radius = 1.0;
    double pitch = 0.2;
    double turns = 3.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    bool random_rotation = true;
};

/// Centered helix (radius cos t, radius sin t, pitch t) at n equispaced t in
/// [0, 2 pi turns], embedded in R^p by a rotation plus N(0, sigma^2/p) noise.
Dataset generate_helix(const HelixConfig& config);

enum class SimMethod { classical, svht, mds_plus };

std::string to_string(SimMethod method);
std::optional<SimMethod> parse_sim_method(const std::string& name);

struct TrialRecord {
    std::size_t trial = 0;
    std::optional<double> empirical_loss_mds;
    std::optional<double> empirical_loss_svht;
    std::optional<double> empirical_loss_mdsplus;
    std::size_t rhat = 0;  // eigenvalues of S with sqrt above the bulk edge
    std::optional<double> sigma_hat;
    std::vector<double> top_singular_values;
};

struct LossSummary {
    double mean = 0.0;
    double standard_deviation = 0.0;
    double standard_error = 0.0;
};

struct TheoryBlock {
    double mds_asymptotic_loss = 0.0;
    double mdsplus_asymptotic_loss = 0.0;
    double regret = 0.0;
    double lambda_star = 0.0;
    double bulk_edge = 0.0;
};

struct ExperimentReport {
    SpikedConfig config;
    std::size_t trials = 0;
    std::vector<SimMethod> methods;
    std::size_t r_for_mds = 0;
    std::vector<TrialRecord> records;
    std::optional<LossSummary> mds;
    std::optional<LossSummary> svht;
    std::optional<LossSummary> mdsplus;
    std::optional<TheoryBlock> theory;  // absent when sigma = 0
};

LossSummary summarize(const std::vector<double>& losses);

/// Runs `trials` independent trials. Trial k draws from trial_seed(seed, k) and
/// records are ordered by trial index, so the report does not depend on `threads`.
ExperimentReport run_experiment(const SpikedConfig& config, std::size_t trials,
                                const std::vector<SimMethod>& methods, std::size_t r_for_mds,
                                std::size_t threads = 1);

nlohmann::json to_json(const ExperimentReport& report);

/// Per-trial records flattened to CSV with a '#' header line.
std::string trials_csv(const ExperimentReport& report);

}  // namespace mdsplus
