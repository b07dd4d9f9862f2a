#include "mdsplus/cli.hpp"

#include "mdsplus/csv.hpp"
#include "mdsplus/errors.hpp"
#include "mdsplus/mds.hpp"
#include "mdsplus/noise.hpp"
#include "mdsplus/procrustes.hpp"
#include "mdsplus/simulation.hpp"
#include "mdsplus/spike_model.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

namespace mdsplus::cli {

namespace {

/// Thrown for flag combinations or values the subcommand cannot accept.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EmbedOptions {
    std::string points;
    std::string distances;
    std::string method;
    std::string r;
    std::optional<double> lambda;
    std::optional<std::size_t> ambient_dim;
    std::string sigma;
    std::string out;
};

struct TheoryOptions {
    double beta = 0.0;
    double sigma = 0.0;
    std::vector<double> values;
    std::vector<double> signal;
    std::size_t r = 0;
};

struct SimulateOptions {
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> signal;
    double sigma = 1.0;
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> methods{"classical", "svht", "mds_plus"};
    std::optional<std::size_t> r;
    std::string out;
    std::string csv_out;
    std::size_t threads = 1;
};

struct GenerateOptions {
    std::string kind;
    std::size_t n = 0;
    std::size_t p = 0;
    std::vector<double> signal;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    double radius = 1.0;
    double pitch = 0.2;
    double turns = 3.0;
    std::string out;
    std::string truth_out;
};

struct LossOptions {
    std::string embedding;
    std::string reference;
};

std::optional<double> parse_sigma(const std::string& text) {
    if (text.empty() || text == "auto") {
        return std::nullopt;
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !(value > 0.0) || !std::isfinite(value)) {
        throw UsageError("--sigma must be a positive number or 'auto', got '" + text + "'");
    }
    return value;
}

void require_positive(double value, const char* flag) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw UsageError(std::string(flag) + " must be positive");
    }
}

std::vector<double> descending(const Vector& v) {
    return {v.data(), v.data() + v.size()};
}

DistanceMatrix load_distances(const EmbedOptions& opt, std::size_t& p) {
    if (!opt.points.empty()) {
        const Matrix points = csv::read_matrix_file(opt.points);
        p = opt.ambient_dim.value_or(static_cast<std::size_t>(points.cols()));
        return pairwise_sq_distances(points);
    }
    if (!opt.ambient_dim) {
        throw UsageError("--ambient-dim is required with --distances");
    }
    p = *opt.ambient_dim;
    return DistanceMatrix(csv::read_matrix_file(opt.distances));
}

void write_embedding(const Embedding& embedding, const std::string& path) {
    csv::write_matrix_file(path, embedding.coords,
                           embedding.dim() == 0 ? "empty embedding (r=0)" : std::string());
    std::ofstream sidecar(path + ".json");
    if (!sidecar) {
        throw std::runtime_error("cannot open '" + path + ".json' for writing");
    }
    sidecar << embedding_sidecar(embedding).dump(2) << '\n';
}

int cmd_embed(const EmbedOptions& opt, std::ostream& out, std::ostream& err) {
    if (opt.points.empty() == opt.distances.empty()) {
        throw UsageError("supply exactly one of a points CSV or --distances");
    }
    if (opt.ambient_dim && *opt.ambient_dim < 1) {
        throw UsageError("--ambient-dim must be positive");
    }
    if (opt.method == "classical" && (opt.r.empty() || opt.lambda)) {
        throw UsageError("--method classical needs --r (count or 'auto') and no --lambda");
    }
    if (opt.method == "svht" && (!opt.r.empty() || (opt.lambda.has_value() == !opt.sigma.empty()))) {
        throw UsageError("--method svht needs exactly one of --lambda or --sigma");
    }
    if (opt.method == "optimal" && (!opt.r.empty() || opt.lambda)) {
        throw UsageError("--method optimal does not take --r or --lambda");
    }
    if (opt.lambda) {
        require_positive(*opt.lambda, "--lambda");
    }
    std::optional<std::size_t> r_count;
    if (opt.method == "classical" && opt.r != "auto") {
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(opt.r.data(), opt.r.data() + opt.r.size(), value);
        if (ec != std::errc{} || ptr != opt.r.data() + opt.r.size()) {
            throw UsageError("--r must be a nonnegative count or 'auto'");
        }
        r_count = value;
    }
    const std::optional<double> sigma = parse_sigma(opt.sigma);

    std::size_t p = 0;
    const DistanceMatrix delta = load_distances(opt, p);
    const SpectralDecomposition spectrum = similarity_spectrum(delta);
    const auto n = static_cast<std::size_t>(delta.size());
    const double beta = static_cast<double>(n - 1) / static_cast<double>(p);
    auto resolve_sigma = [&] {
        return sigma ? *sigma : estimate_sigma(leading_eigenvalues(spectrum, p), n, p);
    };

    Embedding embedding;
    if (opt.method == "classical") {
        if (r_count) {
            embedding = classical_mds(spectrum, *r_count);
        } else {
            const double s = resolve_sigma();
            const std::size_t r = optimal_embedding_dim(descending(spectrum.values), SpikeParams(beta, s));
            embedding = classical_mds(spectrum, r);
            embedding.sigma_used = s;
        }
        embedding.beta = beta;
    } else if (opt.method == "svht") {
        if (opt.lambda) {
            embedding = svht_embed(spectrum, *opt.lambda);
        } else {
            const double s = resolve_sigma();
            embedding = svht_embed(spectrum, optimal_hard_threshold(SpikeParams(beta, s)));
            embedding.sigma_used = s;
        }
        embedding.beta = beta;
    } else {
        embedding = mds_plus(spectrum, p, sigma);
    }
    if (embedding.dim() == 0 &&
        std::find(embedding.warnings.begin(), embedding.warnings.end(),
                  "no eigenvalue of S exceeds the bulk edge; embedding is empty") == embedding.warnings.end()) {
        embedding.warnings.push_back("embedding is empty (r=0)");
    }
    for (const auto& w : embedding.warnings) {
        err << "warning: " << w << '\n';
    }
    write_embedding(embedding, opt.out);
    out << "r " << embedding.dim() << '\n';
    if (embedding.sigma_used) out << "sigma_used " << format12(*embedding.sigma_used) << '\n';
    return kSuccess;
}

int cmd_estimate_sigma(const EmbedOptions& opt, std::ostream& out) {
    if (opt.distances.empty() || !opt.ambient_dim) {
        throw UsageError("estimate-sigma needs --distances and --ambient-dim");
    }
    if (*opt.ambient_dim < 1) {
        throw UsageError("--ambient-dim must be positive");
    }
    const std::size_t p = *opt.ambient_dim;
    const DistanceMatrix delta(csv::read_matrix_file(opt.distances));
    const auto n = static_cast<std::size_t>(delta.size());
    const Vector eigs = sym_eigvals(similarity_from_distances(delta).values());
    const auto count = std::min<std::size_t>(n, p);
    const double sigma_hat = estimate_sigma({eigs.data(), eigs.data() + count}, n, p);
    out << "sigma_hat " << format12(sigma_hat) << '\n';
    out << "beta " << format12(static_cast<double>(n - 1) / static_cast<double>(p)) << '\n';
    return kSuccess;
}

int cmd_threshold(const TheoryOptions& opt, std::ostream& out) {
    require_positive(opt.beta, "--beta");
    require_positive(opt.sigma, "--sigma");
    const SpikeParams params(opt.beta, opt.sigma);
    out << "lambda_star " << format12(optimal_hard_threshold(params)) << '\n';
    out << "bulk_edge " << format12(bulk_edge(params)) << '\n';
    return kSuccess;
}

int cmd_shrink(const TheoryOptions& opt, std::ostream& out) {
    require_positive(opt.beta, "--beta");
    require_positive(opt.sigma, "--sigma");
    for (double v : opt.values) {
        if (!(v >= 0.0)) {
            throw UsageError("--values must be nonnegative");
        }
    }
    const SpikeParams params(opt.beta, opt.sigma);
    for (double v : opt.values) {
        out << format12(optimal_shrinker(v, params)) << '\n';
    }
    return kSuccess;
}

SignalSpectrum parse_signal(std::vector<double> signal) {
    std::sort(signal.begin(), signal.end(), std::greater<>());
    try {
        return SignalSpectrum(std::move(signal));
    } catch (const PreconditionError& e) {
        throw UsageError(std::string("--signal: ") + e.what());
    }
}

int cmd_theory_loss(const TheoryOptions& opt, std::ostream& out) {
    require_positive(opt.beta, "--beta");
    require_positive(opt.sigma, "--sigma");
    const SignalSpectrum spectrum = parse_signal(opt.signal);
    const SpikeParams params(opt.beta, opt.sigma);
    out << "mds_loss " << format12(mds_asymptotic_loss(spectrum, opt.r, params)) << '\n';
    out << "mdsplus_loss " << format12(mdsplus_asymptotic_loss(spectrum, params)) << '\n';
    out << "regret " << format12(regret(spectrum, opt.r, params)) << '\n';
    return kSuccess;
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
    SpikedConfig config;
    config.n = opt.n;
    config.p = opt.p;
    config.spectrum = parse_signal(opt.signal);
    config.sigma = opt.sigma;
    config.seed = opt.seed;
    std::vector<SimMethod> methods;
    for (const auto& name : opt.methods) {
        const auto m = parse_sim_method(name);
        if (!m) {
            throw UsageError("unknown method '" + name + "'");
        }
        if (std::find(methods.begin(), methods.end(), *m) == methods.end()) methods.push_back(*m);
    }
    try {
        config.validate();
    } catch (const PreconditionError& e) {
        throw UsageError(e.what());
    }
    if (opt.trials < 1) {
        throw UsageError("--trials must be at least 1");
    }
    const std::size_t r = opt.r.value_or(config.spectrum.size());
    if (r >= config.n) {
        throw UsageError("--r must be smaller than n");
    }
    err << "simulating " << opt.trials << " trial(s), n=" << opt.n << " p=" << opt.p << '\n';
    const ExperimentReport report = run_experiment(config, opt.trials, methods, r, opt.threads);
    const std::string json = to_json(report).dump(2) + "\n";
    if (opt.out.empty() || opt.out == "-") {
        out << json;
    } else {
        std::ofstream file(opt.out);
        if (!file) throw std::runtime_error("cannot open '" + opt.out + "' for writing");
        file << json;
    }
    if (!opt.csv_out.empty()) {
        std::ofstream file(opt.csv_out);
        if (!file) throw std::runtime_error("cannot open '" + opt.csv_out + "' for writing");
        file << trials_csv(report);
    }
    return kSuccess;
}

int cmd_generate(const GenerateOptions& opt, std::ostream& err) {
    Dataset data;
    if (opt.kind == "helix") {
        HelixConfig config;
        config.n = opt.n;
        config.p = opt.p;
        config.radius = opt.radius;
        config.pitch = opt.pitch;
        config.turns = opt.turns;
        config.sigma = opt.sigma;
        config.seed = opt.seed;
        try {
            data = generate_helix(config);
        } catch (const PreconditionError& e) {
            throw UsageError(e.what());
        }
    } else {
        SpikedConfig config;
        config.n = opt.n;
        config.p = opt.p;
        config.spectrum = parse_signal(opt.signal);
        config.sigma = opt.sigma;
        config.seed = opt.seed;
        try {
            config.validate();
        } catch (const PreconditionError& e) {
            throw UsageError(e.what());
        }
        data = generate_spiked_dataset(config);
    }
    csv::write_matrix_file(opt.out, data.y);
    if (!opt.truth_out.empty()) {
        csv::write_matrix_file(opt.truth_out, data.x);
    }
    err << "wrote " << data.y.rows() << "x" << data.y.cols() << " observations to " << opt.out << '\n';
    return kSuccess;
}

Matrix read_embedding_file(const std::string& path, Eigen::Index rows_hint) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string first;
    std::getline(in, first);
    if (first.rfind("#empty", 0) == 0) {
        return Matrix(rows_hint, 0);
    }
    in.clear();
    in.seekg(0);
    return csv::read_matrix(in);
}

int cmd_loss(const LossOptions& opt, std::ostream& out) {
    const Matrix reference = csv::read_matrix_file(opt.reference);
    const Matrix embedding = read_embedding_file(opt.embedding, reference.rows());
    const AlignedPair pair = similarity_distance(embedding, reference);
    out << "similarity_distance " << format12(pair.distance) << '\n';
    out << "loss " << format12(pair.distance * pair.distance) << '\n';
    return kSuccess;
}

}  // namespace

std::string format12(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 12);
    (void)ec;
    return {buf, ptr};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multidimensional scaling with optimal singular value shrinkage", "mdsplus"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    EmbedOptions embed;
    auto* embed_cmd = app.add_subcommand("embed", "Embed points or a distance matrix");
    embed_cmd->add_option("points", embed.points, "Points CSV (one point per row)");
    embed_cmd->add_option("--distances", embed.distances, "Squared distance matrix CSV");
    embed_cmd->add_option("--method", embed.method, "classical | svht | optimal")
        ->required()
        ->check(CLI::IsMember({"classical", "svht", "optimal"}));
    embed_cmd->add_option("--r", embed.r, "Embedding dimension for classical MDS, or 'auto'");
    embed_cmd->add_option("--lambda", embed.lambda, "Hard threshold on the singular value scale");
    embed_cmd->add_option("--ambient-dim", embed.ambient_dim, "Ambient dimension p");
    embed_cmd->add_option("--sigma", embed.sigma, "Noise level, or 'auto'");
    embed_cmd->add_option("--out", embed.out, "Output CSV; the sidecar goes to <out>.json")->required();

    EmbedOptions estimate;
    auto* estimate_cmd = app.add_subcommand("estimate-sigma", "Estimate the noise level from distances");
    estimate_cmd->add_option("--distances", estimate.distances, "Squared distance matrix CSV")->required();
    estimate_cmd->add_option("--ambient-dim", estimate.ambient_dim, "Ambient dimension p")->required();

    TheoryOptions threshold;
    auto* threshold_cmd = app.add_subcommand("threshold", "Optimal hard threshold and bulk edge");
    threshold_cmd->add_option("--beta", threshold.beta, "Aspect ratio (n-1)/p")->required();
    threshold_cmd->add_option("--sigma", threshold.sigma, "Noise level")->required();

    TheoryOptions shrink;
    auto* shrink_cmd = app.add_subcommand("shrink", "Apply the optimal shrinker to singular values");
    shrink_cmd->add_option("--beta", shrink.beta, "Aspect ratio (n-1)/p")->required();
    shrink_cmd->add_option("--sigma", shrink.sigma, "Noise level")->required();
    shrink_cmd->add_option("--values", shrink.values, "Comma-separated singular values")
        ->required()
        ->delimiter(',');

    SimulateOptions simulate;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo experiment on the spiked model");
    simulate_cmd->add_option("--n", simulate.n, "Number of points")->required();
    simulate_cmd->add_option("--p", simulate.p, "Ambient dimension")->required();
    simulate_cmd->add_option("--signal", simulate.signal, "Signal singular values x1,x2,...")
        ->delimiter(',');
    simulate_cmd->add_option("--sigma", simulate.sigma, "Noise level (0 allowed)");
    simulate_cmd->add_option("--trials", simulate.trials, "Number of trials");
    simulate_cmd->add_option("--seed", simulate.seed, "Master seed");
    simulate_cmd->add_option("--methods", simulate.methods, "classical,svht,mds_plus")->delimiter(',');
    simulate_cmd->add_option("--r", simulate.r, "Embedding dimension for classical MDS (default d)");
    simulate_cmd->add_option("--out", simulate.out, "Report JSON path ('-' for stdout)");
    simulate_cmd->add_option("--csv", simulate.csv_out, "Optional per-trial CSV path");
    simulate_cmd->add_option("--threads", simulate.threads, "Worker threads")
        ->check(CLI::PositiveNumber);

    TheoryOptions theory;
    auto* theory_cmd = app.add_subcommand("theory-loss", "Asymptotic losses of MDS and MDS+");
    theory_cmd->add_option("--signal", theory.signal, "Signal singular values x1,x2,...")
        ->required()
        ->delimiter(',');
    theory_cmd->add_option("--beta", theory.beta, "Aspect ratio (n-1)/p")->required();
    theory_cmd->add_option("--sigma", theory.sigma, "Noise level")->required();
    theory_cmd->add_option("--r", theory.r, "Embedding dimension of classical MDS")->required();

    GenerateOptions generate;
    auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic helix or spiked dataset");
    generate_cmd->add_option("kind", generate.kind, "helix | spiked")
        ->required()
        ->check(CLI::IsMember({"helix", "spiked"}));
    generate_cmd->add_option("--n", generate.n, "Number of points")->required();
    generate_cmd->add_option("--p", generate.p, "Ambient dimension")->required();
    generate_cmd->add_option("--signal", generate.signal, "Signal singular values (spiked)")
        ->delimiter(',');
    generate_cmd->add_option("--sigma", generate.sigma, "Noise level");
    generate_cmd->add_option("--seed", generate.seed, "Seed");
    generate_cmd->add_option("--radius", generate.radius, "Helix radius");
    generate_cmd->add_option("--pitch", generate.pitch, "Helix pitch");
    generate_cmd->add_option("--turns", generate.turns, "Helix turns");
    generate_cmd->add_option("--out", generate.out, "Observations CSV")->required();
    generate_cmd->add_option("--truth", generate.truth_out, "Clean configuration CSV");

    LossOptions loss;
    auto* loss_cmd = app.add_subcommand("loss", "Embedding loss against a reference configuration");
    loss_cmd->add_option("--embedding", loss.embedding, "Embedding CSV")->required();
    loss_cmd->add_option("--reference", loss.reference, "Reference points CSV")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kUsageError;
    }

    try {
        if (embed_cmd->parsed()) return cmd_embed(embed, out, err);
        if (estimate_cmd->parsed()) return cmd_estimate_sigma(estimate, out);
        if (threshold_cmd->parsed()) return cmd_threshold(threshold, out);
        if (shrink_cmd->parsed()) return cmd_shrink(shrink, out);
        if (simulate_cmd->parsed()) return cmd_simulate(simulate, out, err);
        if (theory_cmd->parsed()) return cmd_theory_loss(theory, out);
        if (generate_cmd->parsed()) return cmd_generate(generate, err);
        if (loss_cmd->parsed()) return cmd_loss(loss, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kFailure;
}

}  // namespace mdsplus::cli
