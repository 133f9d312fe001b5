#pragma once

#include "mgc/matrix.hpp"

namespace mgc {

/// Eigenpairs of a real symmetric matrix, ascending eigenvalues.
/// Column j of `vectors` is the unit-norm eigenvector of `values[j]`.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

/// Cyclic Jacobi eigensolver.
///
/// Throws NumericError if `s` is not symmetric to 1e-12 (relative to its
/// largest entry) or the sweep limit is hit. The result satisfies
/// ‖S v_j − μ_j v_j‖∞ ≤ 1e-10·max(1, ‖S‖∞).
EigenPairs sym_eig(const Matrix& s);

/// Real roots of a·x³ + b·x² + c·x + d.
struct CubicRoots {
  Vector roots;         ///< ascending, near-coincident roots merged
  double discriminant;  ///< 18abcd − 4b³d + b²c² − 4ac³ − 27a²d²
};

/// Trigonometric solution when Δ > 0, Cardano plus deflation otherwise,
/// Newton-polished in both cases. Throws std::invalid_argument if a == 0.
CubicRoots cubic_real_roots(double a, double b, double c, double d);

/// Gauss-Jordan inverse with partial pivoting. Throws NumericError on a
/// singular pivot or when ‖M‖∞‖M⁻¹‖∞ exceeds 1e12.
Matrix invert(const Matrix& m);

}  // namespace mgc
