#pragma once

#include "mdsplus/matrix.hpp"

namespace mdsplus {

/// Result of aligning two point sets over the full orthogonal group.
struct AlignedPair {
    double distance = 0.0;
    Matrix rotation;  // l x l, applied on the right of the padded second argument
    Eigen::Index width = 0;
};

/// min over orthogonal R of ||H A_pad - H B_pad R||_F, with A and B zero-padded
/// to width max(d, r). Solved by the polar factor of (H B_pad)^T (H A_pad).
AlignedPair similarity_distance(const Matrix& a, const Matrix& b);

/// Squared similarity distance between an embedding and the reference points.
double embedding_loss(const Matrix& xhat, const Matrix& x);

}  // namespace mdsplus
