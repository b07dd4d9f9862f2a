#include "mdsplus/matrix.hpp"

#include "mdsplus/errors.hpp"

#include <Eigen/Eigenvalues>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace mdsplus {

namespace {

constexpr double kDistanceTolerance = 1e-9;
constexpr double kSymmetryTolerance = 1e-10;

void require_symmetric(const Matrix& s) {
    if (s.rows() != s.cols()) {
        throw PreconditionError("sym_eig: matrix is not square");
    }
    const double scale = s.norm();
    if ((s - s.transpose()).norm() > kSymmetryTolerance * scale) {
        throw PreconditionError("sym_eig: matrix is not symmetric");
    }
}

// LAPACK divide-and-conquer driver; returns ascending values and, when
// `vectors` is set, overwrites `a` with the eigenvectors.
Vector run_syevd(Matrix& a, bool vectors) {
    const auto n = static_cast<lapack_int>(a.rows());
    Vector w(a.rows());
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, a.data(),
                                           n, w.data());
    if (info != 0) {
        throw std::runtime_error("sym_eig: LAPACK dsyevd failed with info=" + std::to_string(info));
    }
    return w;
}

// Randomized O(n^2) probe of V^T V = I and S V = V diag(w). Some optimized
// BLAS builds silently return wrong eigenvectors on CPUs they misdetect.
bool decomposition_is_sound(const Matrix& s, const Matrix& v, const Vector& w) {
    const Eigen::Index n = s.rows();
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = normal(rng);
    const double tol = 1e3 * std::numeric_limits<double>::epsilon() * static_cast<double>(n);
    const Vector vg = v * g;
    const bool orthonormal = (v.transpose() * vg - g).norm() <= tol * g.norm();
    const double scale = std::max(w.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const bool residual = (s * vg - v * w.cwiseProduct(g)).norm() <= tol * scale * g.norm();
    return orthonormal && residual;
}

std::vector<Eigen::Index> descending_order(const Vector& w) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(w.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return w(a) > w(b); });
    return order;
}

}  // namespace

void require_finite(const Matrix& m, const char* what) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw PreconditionError(std::string(what) + ": matrix must have at least one row and column");
    }
    if (!m.allFinite()) {
        throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
    }
}

DistanceMatrix::DistanceMatrix(Matrix delta) {
    require_finite(delta, "DistanceMatrix");
    if (delta.rows() != delta.cols()) {
        throw ParseError("distance matrix is not square");
    }
    const double scale = std::max(delta.cwiseAbs().maxCoeff(), 1e-300);
    const double tol = kDistanceTolerance * scale;
    const Eigen::Index n = delta.rows();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(delta(i, i)) > tol) {
            throw ParseError("distance matrix has a nonzero diagonal entry at row " + std::to_string(i));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (delta(i, j) < -tol) {
                throw ParseError("distance matrix has a negative entry at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
            }
            if (std::abs(delta(i, j) - delta(j, i)) > tol) {
                throw ParseError("distance matrix is not symmetric at (" + std::to_string(i) + "," +
                                 std::to_string(j) + ")");
            }
        }
    }
    delta_ = (0.5 * (delta + delta.transpose())).cwiseMax(0.0);
    delta_.diagonal().setZero();
}

SimilarityMatrix::SimilarityMatrix(Matrix s) : s_(std::move(s)) {
    require_finite(s_, "SimilarityMatrix");
    if (s_.rows() != s_.cols()) {
        throw PreconditionError("similarity matrix is not square");
    }
}

DistanceMatrix pairwise_sq_distances(const Matrix& points) {
    require_finite(points, "pairwise_sq_distances");
    // Centering first keeps the Gram expansion accurate for offset data.
    const Matrix centered = center_rows(points);
    Matrix gram = centered * centered.transpose();
    const Vector sq = gram.diagonal();
    Matrix delta = (-2.0 * gram).colwise() + sq;
    delta.rowwise() += sq.transpose();
    delta = (0.5 * (delta + delta.transpose())).cwiseMax(0.0);
    delta.diagonal().setZero();
    return DistanceMatrix(std::move(delta));
}

Matrix center_rows(const Matrix& m) {
    if (m.rows() < 1) {
        throw PreconditionError("center_rows: matrix must have at least one row");
    }
    Matrix out = m;
    out.rowwise() -= m.colwise().mean();
    return out;
}

SpectralDecomposition sym_eig(const Matrix& s) {
    require_finite(s, "sym_eig");
    require_symmetric(s);
    Matrix a = s;
    Vector w = run_syevd(a, true);
    if (!decomposition_is_sound(s, a, w)) {
        const Eigen::SelfAdjointEigenSolver<Matrix> fallback(s);
        a = fallback.eigenvectors();
        w = fallback.eigenvalues();
    }
    const auto order = descending_order(w);

    SpectralDecomposition out;
    out.values.resize(w.size());
    out.vectors.resize(a.rows(), a.cols());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.values(k) = w(src);
        Eigen::Index arg = 0;
        a.col(src).cwiseAbs().maxCoeff(&arg);
        const double sign = a(arg, src) < 0.0 ? -1.0 : 1.0;
        out.vectors.col(k) = sign * a.col(src);
    }
    return out;
}

Vector sym_eigvals(const Matrix& s) {
    require_finite(s, "sym_eigvals");
    require_symmetric(s);
    Matrix a = s;
    Vector w = run_syevd(a, false);
    std::sort(w.begin(), w.end(), std::greater<>());
    return w;
}

SingularValueDecomposition svd(const Matrix& m) {
    require_finite(m, "svd");
    Eigen::BDCSVD<Matrix> solver(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {solver.matrixU(), solver.singularValues(), solver.matrixV()};
}

}  // namespace mdsplus
