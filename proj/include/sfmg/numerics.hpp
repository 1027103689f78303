#pragma once

#include <Eigen/Dense>

#include "sfmg/rng.hpp"

namespace sfmg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SymEig {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, one per eigenvalue
};

/// Cyclic Jacobi eigensolver for dense symmetric matrices.
///
/// Each eigenvector is sign-normalized so that its largest-magnitude entry is
/// positive (the first such entry on near-ties), which makes the output a
/// deterministic function of the input. Equal eigenvalues keep the order in
/// which the sweeps produced them.
SymEig sym_eig(const Matrix& m);

struct ThinQr {
  Matrix q;  // n x k, orthonormal columns
  Matrix r;  // k x k, upper triangular with positive diagonal
};

/// Reduced QR by twice-iterated classical Gram-Schmidt. Throws
/// DegenerateInputError naming the first column that is numerically in the
/// span of its predecessors.
ThinQr thin_qr(const Matrix& m);

/// Columns orthonormal to `basis` (n x k, orthonormal) that complete it to an
/// orthonormal basis of R^n; returns n x (n - k). Standard basis vectors are
/// orthogonalized in order of decreasing residual, so the result is
/// deterministic.
Matrix orthonormal_completion(const Matrix& basis);

/// Scaling and squaring with the degree-13 Pade approximant.
Matrix matrix_exp(const Matrix& m);

/// Principal logarithm of a special orthogonal matrix, returned exactly
/// skew-symmetric. Uses inverse scaling and squaring: Denman-Beavers square
/// roots until the argument is within 0.5 of the identity, then the Mercator
/// series. Throws BranchCutError when the spectrum touches -1.
Matrix orthogonal_log(const Matrix& v);

/// Principal square root by the Denman-Beavers iteration.
Matrix sqrtm_denman_beavers(const Matrix& m);

/// i.i.d. standard normals, filled in row-major order.
Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

inline Matrix skew_part(const Matrix& m) { return 0.5 * (m - m.transpose()); }
inline Matrix sym_part(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace sfmg
