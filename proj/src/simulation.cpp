#include "mdsplus/simulation.hpp"

#include "mdsplus/csv.hpp"
#include "mdsplus/errors.hpp"
#include "mdsplus/mds.hpp"
#include "mdsplus/noise.hpp"
#include "mdsplus/procrustes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace mdsplus {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(splitmix64(master) ^ splitmix64(trial + 0x632BE59BD9B4E019ULL));
}

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix g(rows, cols);
    // Fill in column-major order so the draw sequence is fixed.
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            g(i, j) = stddev * normal(rng);
        }
    }
    return g;
}

Matrix random_orthonormal_rows(Eigen::Index k, Eigen::Index p, Rng& rng) {
    if (k < 0 || k > p) {
        throw PreconditionError("random_orthonormal_rows: need 0 <= k <= p");
    }
    if (k == 0) {
        return Matrix(0, p);
    }
    const Matrix g = gaussian_matrix(p, k, 1.0, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(p, k);
    const Matrix& r = qr.matrixQR();
    // Sign-fixing the diagonal of R makes Q Haar distributed.
    for (Eigen::Index j = 0; j < k; ++j) {
        if (r(j, j) < 0.0) {
            q.col(j) *= -1.0;
        }
    }
    return q.transpose();
}

Matrix haar_orthogonal(Eigen::Index p, Rng& rng) {
    return random_orthonormal_rows(p, p, rng);
}

void SpikedConfig::validate() const {
    const std::size_t d = spectrum.size();
    if (n < 2) {
        throw PreconditionError("spiked config: n must be at least 2");
    }
    if (p < 1) {
        throw PreconditionError("spiked config: p must be at least 1");
    }
    if (d >= n) {
        throw PreconditionError("spiked config: signal rank d must be smaller than n");
    }
    if (d > p) {
        throw PreconditionError("spiked config: signal rank d must not exceed p");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw PreconditionError("spiked config: sigma must be finite and nonnegative");
    }
}

Dataset generate_spiked_dataset(const SpikedConfig& config) {
    Rng rng(config.seed);
    return generate_spiked_dataset(config, rng);
}

Dataset generate_spiked_dataset(const SpikedConfig& config, Rng& rng) {
    config.validate();
    const auto n = static_cast<Eigen::Index>(config.n);
    const auto p = static_cast<Eigen::Index>(config.p);
    const auto d = static_cast<Eigen::Index>(config.spectrum.size());

    Dataset out;
    out.x = Matrix::Zero(n, d);
    if (d > 0) {
        // Random centered frame, then force the exact singular values.
        const Matrix frame = center_rows(gaussian_matrix(n, d, 1.0, rng));
        const Matrix right = haar_orthogonal(d, rng);
        const auto basis = svd(frame);
        Vector values(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            values(i) = config.spectrum.values()[static_cast<std::size_t>(i)];
        }
        out.x = basis.left * values.asDiagonal() * right;
    }
    const Matrix rotation_rows = random_orthonormal_rows(d, p, rng);
    out.y = gaussian_matrix(n, p, config.sigma / std::sqrt(static_cast<double>(p)), rng);
    if (d > 0) {
        out.y.noalias() += out.x * rotation_rows;
    }
    return out;
}

Dataset generate_helix(const HelixConfig& config) {
    if (config.p < 3) {
        throw PreconditionError("generate_helix: p must be at least 3");
    }
    if (config.n < 2) {
        throw PreconditionError("generate_helix: n must be at least 2");
    }
    if (!(config.sigma >= 0.0)) {
        throw PreconditionError("generate_helix: sigma must be nonnegative");
    }
    Rng rng(config.seed);
    const auto n = static_cast<Eigen::Index>(config.n);
    const auto p = static_cast<Eigen::Index>(config.p);
    Matrix x(n, 3);
    const double span = 2.0 * std::numbers::pi * config.turns;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = span * static_cast<double>(i) / static_cast<double>(n - 1);
        x(i, 0) = config.radius * std::cos(t);
        x(i, 1) = config.radius * std::sin(t);
        x(i, 2) = config.pitch * t;
    }
    Dataset out;
    out.x = center_rows(x);
    const Matrix rotation_rows =
        config.random_rotation ? random_orthonormal_rows(3, p, rng) : Matrix(Matrix::Identity(3, p));
    out.y = out.x * rotation_rows;
    if (config.sigma > 0.0) {
        out.y += gaussian_matrix(n, p, config.sigma / std::sqrt(static_cast<double>(p)), rng);
    }
    return out;
}

std::string to_string(SimMethod method) {
    switch (method) {
        case SimMethod::classical: return "classical";
        case SimMethod::svht: return "svht";
        case SimMethod::mds_plus: return "mds_plus";
    }
    return "unknown";
}

std::optional<SimMethod> parse_sim_method(const std::string& name) {
    if (name == "classical" || name == "mds") return SimMethod::classical;
    if (name == "svht") return SimMethod::svht;
    if (name == "mds_plus" || name == "mdsplus" || name == "optimal") return SimMethod::mds_plus;
    return std::nullopt;
}

LossSummary summarize(const std::vector<double>& losses) {
    LossSummary out;
    if (losses.empty()) {
        return out;
    }
    const auto count = static_cast<double>(losses.size());
    double sum = 0.0;
    for (double v : losses) sum += v;
    out.mean = sum / count;
    if (losses.size() > 1) {
        double ss = 0.0;
        for (double v : losses) ss += (v - out.mean) * (v - out.mean);
        out.standard_deviation = std::sqrt(ss / (count - 1.0));
    }
    out.standard_error = out.standard_deviation / std::sqrt(count);
    return out;
}

namespace {

bool wants(const std::vector<SimMethod>& methods, SimMethod m) {
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

TrialRecord run_trial(const SpikedConfig& config, std::size_t trial, const std::vector<SimMethod>& methods,
                      std::size_t r_for_mds) {
    Rng rng(trial_seed(config.seed, trial));
    const Dataset data = generate_spiked_dataset(config, rng);
    const SpectralDecomposition spectrum = similarity_spectrum(pairwise_sq_distances(data.y));
    const double beta = config.beta();

    TrialRecord rec;
    rec.trial = trial;
    if (config.n >= 8) {
        rec.sigma_hat = estimate_sigma(leading_eigenvalues(spectrum, config.p), config.n, config.p);
    }
    const double edge = config.sigma * (1.0 + std::sqrt(beta));
    const std::size_t top = std::min<std::size_t>(config.spectrum.size() + 3, config.n);
    for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
        const double y = std::sqrt(std::max(spectrum.values(i), 0.0));
        if (static_cast<std::size_t>(i) < top) {
            rec.top_singular_values.push_back(y);
        }
    }
    if (config.sigma > 0.0) {
        for (Eigen::Index i = 0; i < spectrum.values.size(); ++i) {
            if (spectrum.values(i) > 0.0 && std::sqrt(spectrum.values(i)) > edge) ++rec.rhat;
        }
    }

    if (wants(methods, SimMethod::classical)) {
        rec.empirical_loss_mds = embedding_loss(classical_mds(spectrum, r_for_mds).coords, data.x);
    }
    const auto identity = [](double y) { return y; };
    if (wants(methods, SimMethod::svht)) {
        const Embedding e = config.sigma > 0.0
                                ? svht_embed(spectrum, optimal_hard_threshold(SpikeParams(beta, config.sigma)))
                                : shrinkage_embed(spectrum, identity);
        rec.empirical_loss_svht = embedding_loss(e.coords, data.x);
    }
    if (wants(methods, SimMethod::mds_plus)) {
        // sigma = 0 is the limit where the optimal shrinker becomes the identity.
        const Embedding e = config.sigma > 0.0 ? mds_plus(spectrum, config.p, config.sigma)
                                               : shrinkage_embed(spectrum, identity);
        rec.empirical_loss_mdsplus = embedding_loss(e.coords, data.x);
        if (config.sigma == 0.0) rec.rhat = e.dim();
    }
    return rec;
}

std::optional<LossSummary> collect(const std::vector<TrialRecord>& records,
                                   std::optional<double> TrialRecord::*field) {
    std::vector<double> values;
    for (const auto& rec : records) {
        if (rec.*field) values.push_back(*(rec.*field));
    }
    if (values.empty()) return std::nullopt;
    return summarize(values);
}

}  // namespace

ExperimentReport run_experiment(const SpikedConfig& config, std::size_t trials,
                                const std::vector<SimMethod>& methods, std::size_t r_for_mds,
                                std::size_t threads) {
    config.validate();
    if (trials < 1) {
        throw PreconditionError("run_experiment: trials must be at least 1");
    }
    if (r_for_mds >= config.n) {
        throw PreconditionError("run_experiment: r must be smaller than n");
    }
    ExperimentReport report;
    report.config = config;
    report.trials = trials;
    report.methods = methods;
    report.r_for_mds = r_for_mds;
    report.records.resize(trials);

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, trials);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    auto work = [&](std::size_t worker) {
        try {
            for (std::size_t k = next++; k < trials; k = next++) {
                report.records[k] = run_trial(config, k, methods, r_for_mds);
            }
        } catch (...) {
            errors[worker] = std::current_exception();
            next = trials;
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    report.mds = collect(report.records, &TrialRecord::empirical_loss_mds);
    report.svht = collect(report.records, &TrialRecord::empirical_loss_svht);
    report.mdsplus = collect(report.records, &TrialRecord::empirical_loss_mdsplus);

    if (config.sigma > 0.0) {
        const SpikeParams params(config.beta(), config.sigma);
        TheoryBlock theory;
        theory.mds_asymptotic_loss = mds_asymptotic_loss(config.spectrum, r_for_mds, params);
        theory.mdsplus_asymptotic_loss = mdsplus_asymptotic_loss(config.spectrum, params);
        theory.regret = regret(config.spectrum, r_for_mds, params);
        theory.lambda_star = optimal_hard_threshold(params);
        theory.bulk_edge = bulk_edge(params);
        report.theory = theory;
    }
    return report;
}

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
}

nlohmann::json summary_json(const std::optional<LossSummary>& s) {
    if (!s) return nlohmann::json();
    return {{"mean", s->mean}, {"standard_deviation", s->standard_deviation},
            {"standard_error", s->standard_error}};
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& report) {
    nlohmann::json doc;
    std::vector<std::string> method_names;
    for (auto m : report.methods) method_names.push_back(to_string(m));
    doc["config"] = {{"n", report.config.n},
                     {"p", report.config.p},
                     {"signal", report.config.spectrum.values()},
                     {"sigma", report.config.sigma},
                     {"seed", report.config.seed},
                     {"beta", report.config.beta()},
                     {"trials", report.trials},
                     {"methods", method_names},
                     {"r_for_mds", report.r_for_mds}};
    nlohmann::json records = nlohmann::json::array();
    for (const auto& rec : report.records) {
        records.push_back({{"trial", rec.trial},
                           {"empirical_loss_mds", optional_json(rec.empirical_loss_mds)},
                           {"empirical_loss_svht", optional_json(rec.empirical_loss_svht)},
                           {"empirical_loss_mdsplus", optional_json(rec.empirical_loss_mdsplus)},
                           {"rhat", rec.rhat},
                           {"sigma_hat", optional_json(rec.sigma_hat)},
                           {"top_singular_values", rec.top_singular_values}});
    }
    doc["trials"] = std::move(records);
    doc["aggregates"] = {{"mds", summary_json(report.mds)},
                         {"svht", summary_json(report.svht)},
                         {"mdsplus", summary_json(report.mdsplus)}};
    if (report.theory) {
        const auto& t = *report.theory;
        doc["theory"] = {{"mds_asymptotic_loss", t.mds_asymptotic_loss},
                         {"mdsplus_asymptotic_loss", t.mdsplus_asymptotic_loss},
                         {"regret", t.regret},
                         {"lambda_star", t.lambda_star},
                         {"bulk_edge", t.bulk_edge}};
    } else {
        doc["theory"] = nullptr;
    }
    return doc;
}

std::string trials_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "#trial,empirical_loss_mds,empirical_loss_svht,empirical_loss_mdsplus,rhat,sigma_hat\n";
    auto field = [](const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); };
    for (const auto& rec : report.records) {
        out << rec.trial << ',' << field(rec.empirical_loss_mds) << ',' << field(rec.empirical_loss_svht)
            << ',' << field(rec.empirical_loss_mdsplus) << ',' << rec.rhat << ',' << field(rec.sigma_hat)
            << '\n';
    }
    return out.str();
}

}  // namespace mdsplus
