#include "mdsplus/mds.hpp"

#include "mdsplus/errors.hpp"
#include "mdsplus/noise.hpp"
#include "mdsplus/spike_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdsplus {

std::string_view to_string(EmbeddingMethod method) {
    switch (method) {
        case EmbeddingMethod::classical: return "classical";
        case EmbeddingMethod::tsvd: return "tsvd";
        case EmbeddingMethod::svht: return "svht";
        case EmbeddingMethod::shrinker: return "shrinker";
        case EmbeddingMethod::mds_plus: return "mds_plus";
    }
    return "unknown";
}

namespace {

// Eigenvalues within this band of zero are rounding noise of a rank-deficient S.
double zero_tolerance(const SpectralDecomposition& spectrum) {
    if (spectrum.values.size() == 0) {
        return 0.0;
    }
    const double scale = spectrum.values.cwiseAbs().maxCoeff();
    return static_cast<double>(spectrum.values.size()) * std::numeric_limits<double>::epsilon() * scale;
}

std::size_t positive_count(const SpectralDecomposition& spectrum) {
    const double tol = zero_tolerance(spectrum);
    return static_cast<std::size_t>((spectrum.values.array() > tol).count());
}

std::size_t clipped_count(const SpectralDecomposition& spectrum) {
    const double tol = zero_tolerance(spectrum);
    return static_cast<std::size_t>((spectrum.values.array() < -tol).count());
}

// Builds coordinates from the leading axes with the given (already shrunk) values.
Embedding assemble(const SpectralDecomposition& spectrum, std::vector<double> axis_values,
                   EmbeddingMethod method) {
    Embedding out;
    const auto r = static_cast<Eigen::Index>(axis_values.size());
    out.coords = spectrum.vectors.leftCols(r);
    for (Eigen::Index i = 0; i < r; ++i) {
        out.coords.col(i) *= axis_values[static_cast<std::size_t>(i)];
    }
    out.axis_values = std::move(axis_values);
    out.method = method;
    out.clipped_count = clipped_count(spectrum);
    if (out.clipped_count > 0) {
        out.warnings.push_back(std::to_string(out.clipped_count) +
                               " negative eigenvalue(s) of S clipped to zero");
    }
    return out;
}

}  // namespace

SimilarityMatrix similarity_from_distances(const DistanceMatrix& delta) {
    // -1/2 H Delta H: double centering of rows and columns.
    Matrix s = delta.values();
    s.rowwise() -= s.colwise().mean();
    s.colwise() -= s.rowwise().mean();
    s *= -0.5;
    return SimilarityMatrix(0.5 * (s + s.transpose()));
}

SpectralDecomposition similarity_spectrum(const DistanceMatrix& delta) {
    return sym_eig(similarity_from_distances(delta).values());
}

Embedding classical_mds(const SpectralDecomposition& spectrum, std::size_t r) {
    const std::size_t available = positive_count(spectrum);
    const std::size_t kept = std::min(r, available);
    std::vector<double> values(kept);
    for (std::size_t i = 0; i < kept; ++i) {
        values[i] = std::sqrt(spectrum.values(static_cast<Eigen::Index>(i)));
    }
    Embedding out = assemble(spectrum, std::move(values), EmbeddingMethod::classical);
    out.requested_dim = r;
    if (kept < r) {
        out.warnings.push_back("requested r=" + std::to_string(r) + " but S has only " +
                               std::to_string(available) + " positive eigenvalue(s)");
    }
    return out;
}

Embedding classical_mds(const DistanceMatrix& delta, std::size_t r) {
    return classical_mds(similarity_spectrum(delta), r);
}

Embedding svht_embed(const SpectralDecomposition& spectrum, double lambda) {
    if (!(lambda > 0.0)) {
        throw PreconditionError("svht_embed: lambda must be positive");
    }
    const std::size_t available = positive_count(spectrum);
    std::vector<double> values;
    for (std::size_t i = 0; i < available; ++i) {
        const double y = std::sqrt(spectrum.values(static_cast<Eigen::Index>(i)));
        if (!(y > lambda)) {
            break;
        }
        values.push_back(y);
    }
    return assemble(spectrum, std::move(values), EmbeddingMethod::svht);
}

Embedding svht_embed(const DistanceMatrix& delta, double lambda) {
    return svht_embed(similarity_spectrum(delta), lambda);
}

Embedding shrinkage_embed(const SpectralDecomposition& spectrum, const ShrinkerFn& eta) {
    if (!eta) {
        throw PreconditionError("shrinkage_embed: empty shrinker");
    }
    if (eta(0.0) != 0.0) {
        throw PreconditionError("shrinkage_embed: shrinker must satisfy eta(0) = 0");
    }
    const std::size_t available = positive_count(spectrum);
    std::vector<double> values;
    for (std::size_t i = 0; i < available; ++i) {
        const double shrunk = eta(std::sqrt(spectrum.values(static_cast<Eigen::Index>(i))));
        // eta is nondecreasing and eigenvalues descend, so retained axes form a prefix.
        if (!(shrunk > 0.0)) {
            break;
        }
        values.push_back(shrunk);
    }
    return assemble(spectrum, std::move(values), EmbeddingMethod::shrinker);
}

Embedding shrinkage_embed(const DistanceMatrix& delta, const ShrinkerFn& eta) {
    return shrinkage_embed(similarity_spectrum(delta), eta);
}

std::vector<double> leading_eigenvalues(const SpectralDecomposition& spectrum, std::size_t p) {
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(spectrum.values.size()), p);
    return {spectrum.values.data(), spectrum.values.data() + count};
}

Embedding mds_plus(const SpectralDecomposition& spectrum, std::size_t p, std::optional<double> sigma) {
    if (p < 1) {
        throw PreconditionError("mds_plus: ambient dimension must be positive");
    }
    const auto n = static_cast<std::size_t>(spectrum.values.size());
    if (n < 2) {
        throw PreconditionError("mds_plus: need at least two points");
    }
    const double beta = static_cast<double>(n - 1) / static_cast<double>(p);
    const double sigma_used = sigma ? *sigma : estimate_sigma(leading_eigenvalues(spectrum, p), n, p);
    const SpikeParams params(beta, sigma_used);
    const double edge = bulk_edge(params);

    const std::size_t available = positive_count(spectrum);
    std::vector<double> values;
    for (std::size_t i = 0; i < available; ++i) {
        const double y = std::sqrt(spectrum.values(static_cast<Eigen::Index>(i)));
        if (!(y > edge)) {
            break;
        }
        const double shrunk = optimal_shrinker(y, params);
        if (!(shrunk > 0.0)) {
            break;
        }
        values.push_back(shrunk);
    }
    Embedding out = assemble(spectrum, std::move(values), EmbeddingMethod::mds_plus);
    out.sigma_used = sigma_used;
    out.beta = beta;
    if (out.dim() == 0) {
        out.warnings.push_back("no eigenvalue of S exceeds the bulk edge; embedding is empty");
    }
    return out;
}

Embedding mds_plus(const DistanceMatrix& delta, std::size_t p, std::optional<double> sigma) {
    return mds_plus(similarity_spectrum(delta), p, sigma);
}

nlohmann::json embedding_sidecar(const Embedding& embedding) {
    nlohmann::json doc;
    doc["method"] = std::string(to_string(embedding.method));
    doc["n"] = embedding.n();
    doc["r"] = embedding.dim();
    doc["axis_values"] = embedding.axis_values;
    doc["clipped_count"] = embedding.clipped_count;
    doc["sigma_used"] = embedding.sigma_used ? nlohmann::json(*embedding.sigma_used) : nlohmann::json();
    doc["beta"] = embedding.beta ? nlohmann::json(*embedding.beta) : nlohmann::json();
    if (embedding.requested_dim) {
        doc["requested_r"] = *embedding.requested_dim;
    }
    doc["warnings"] = embedding.warnings;
    return doc;
}

}  // namespace mdsplus
