#include "mdsplus/procrustes.hpp"

#include "mdsplus/errors.hpp"

#include <algorithm>
#include <string>

namespace mdsplus {

namespace {

Matrix centered_padded(const Matrix& m, Eigen::Index width) {
    Matrix out = Matrix::Zero(m.rows(), width);
    if (m.cols() > 0) {
        out.leftCols(m.cols()) = center_rows(m);
    }
    return out;
}

}  // namespace

AlignedPair similarity_distance(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw PreconditionError("similarity_distance: row counts differ (" + std::to_string(a.rows()) +
                                " vs " + std::to_string(b.rows()) + ")");
    }
    if (!a.allFinite() || !b.allFinite()) {
        throw PreconditionError("similarity_distance: non-finite entries");
    }
    const Eigen::Index n = a.rows();
    const Eigen::Index width = std::max<Eigen::Index>({a.cols(), b.cols(), 1});
    if (n <= std::max(a.cols(), b.cols())) {
        throw PreconditionError("similarity_distance: need more rows than columns");
    }
    const Matrix ha = centered_padded(a, width);
    const Matrix hb = centered_padded(b, width);

    // Polar factor of M = hb^T ha maximizes tr(R^T M) over O(l).
    const Matrix cross = hb.transpose() * ha;
    Eigen::JacobiSVD<Matrix> solver(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    AlignedPair out;
    out.rotation = solver.matrixU() * solver.matrixV().transpose();
    out.distance = (ha - hb * out.rotation).norm();
    out.width = width;
    return out;
}

double embedding_loss(const Matrix& xhat, const Matrix& x) {
    const double d = similarity_distance(xhat, x).distance;
    return d * d;
}

}  // namespace mdsplus
