#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace mdsplus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Squared Euclidean distances between n points.
///
/// Construction validates symmetry, zero diagonal and nonnegativity up to a
/// relative tolerance of 1e-9 of the largest entry, then stores the cleaned
/// (exactly symmetric, exact-zero diagonal, clamped) matrix.
class DistanceMatrix {
public:
    explicit DistanceMatrix(Matrix delta);

    Eigen::Index size() const { return delta_.rows(); }
    const Matrix& values() const { return delta_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return delta_(i, j); }

private:
    Matrix delta_;
};

/// S = -1/2 H Delta H. Symmetric with vanishing row sums.
class SimilarityMatrix {
public:
    explicit SimilarityMatrix(Matrix s);

    Eigen::Index size() const { return s_.rows(); }
    const Matrix& values() const { return s_; }

private:
    Matrix s_;
};

/// Eigenpairs sorted by descending value; column i of `vectors` pairs with values[i].
struct SpectralDecomposition {
    Vector values;
    Matrix vectors;
};

struct SingularValueDecomposition {
    Matrix left;
    Vector values;
    Matrix right;
};

/// Throws PreconditionError on non-finite entries or an empty matrix.
void require_finite(const Matrix& m, const char* what);

DistanceMatrix pairwise_sq_distances(const Matrix& points);

/// H * m with H = I - (1/n) 1 1^T, i.e. subtracts each column's mean.
Matrix center_rows(const Matrix& m);

/// Full eigendecomposition of a symmetric matrix.
///
/// Values are descending; ties keep ascending solver index. Each eigenvector is
/// sign-normalized so that its entry of largest magnitude is positive.
/// Throws PreconditionError when ||s - s^T||_F > 1e-10 ||s||_F.
/// The LAPACK result is probed for orthonormality and residual; if the probe
/// fails (a misbehaving BLAS) Eigen's own solver is used instead.
SpectralDecomposition sym_eig(const Matrix& s);

/// Eigenvalues only, descending. Same symmetry precondition as sym_eig.
Vector sym_eigvals(const Matrix& s);

/// Thin SVD with descending singular values.
SingularValueDecomposition svd(const Matrix& m);

}  // namespace mdsplus
