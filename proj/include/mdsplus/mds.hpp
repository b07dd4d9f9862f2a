#pragma once

#include "mdsplus/matrix.hpp"

#include <json.hpp>

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mdsplus {

enum class EmbeddingMethod { classical, tsvd, svht, shrinker, mds_plus };

std::string_view to_string(EmbeddingMethod method);

/// n x r coordinates whose column i is axis_values[i] * u_i for an
/// eigenvector u_i of S.
struct Embedding {
    Matrix coords;
    std::vector<double> axis_values;
    EmbeddingMethod method = EmbeddingMethod::classical;
    std::size_t clipped_count = 0;          // eigenvalues of S below zero, clipped
    std::optional<std::size_t> requested_dim;
    std::optional<double> sigma_used;
    std::optional<double> beta;
    std::vector<std::string> warnings;

    Eigen::Index n() const { return coords.rows(); }
    std::size_t dim() const { return axis_values.size(); }
};

/// Nondecreasing map [0, inf) -> [0, inf) with eta(0) = 0.
using ShrinkerFn = std::function<double(double)>;

SimilarityMatrix similarity_from_distances(const DistanceMatrix& delta);

/// Eigen-decomposition of the similarity matrix built from delta.
SpectralDecomposition similarity_spectrum(const DistanceMatrix& delta);

// Each estimator comes in two forms: from distances, or from a precomputed
// spectrum of S so callers running several estimators diagonalize only once.

Embedding classical_mds(const DistanceMatrix& delta, std::size_t r);
Embedding classical_mds(const SpectralDecomposition& spectrum, std::size_t r);

Embedding svht_embed(const DistanceMatrix& delta, double lambda);
Embedding svht_embed(const SpectralDecomposition& spectrum, double lambda);

Embedding shrinkage_embed(const DistanceMatrix& delta, const ShrinkerFn& eta);
Embedding shrinkage_embed(const SpectralDecomposition& spectrum, const ShrinkerFn& eta);

/// MDS+: retain axes with sqrt(d_i) above the bulk edge sigma (1 + sqrt(beta)),
/// beta = (n-1)/p, and shrink them with the optimal shrinker. With no sigma the
/// noise level is estimated from the spectrum (requires n >= 8).
Embedding mds_plus(const DistanceMatrix& delta, std::size_t p, std::optional<double> sigma);
Embedding mds_plus(const SpectralDecomposition& spectrum, std::size_t p, std::optional<double> sigma);

/// The min(n, p) largest eigenvalues of S, the input expected by estimate_sigma.
std::vector<double> leading_eigenvalues(const SpectralDecomposition& spectrum, std::size_t p);

/// Sidecar document {method, r, axis_values, clipped_count, sigma_used, beta, ...}.
nlohmann::json embedding_sidecar(const Embedding& embedding);

}  // namespace mdsplus
