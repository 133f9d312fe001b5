#pragma once

#include <cstddef>

#include "mgc/grid_model.hpp"
#include "mgc/matrix.hpp"

namespace mgc {

/// Laplacian eigenstructure with the column convention applied:
/// column 0 is exactly 1_n, every other column is scaled so that its last
/// entry with magnitude above 1e-10 equals +1.
struct LaplacianSpectrum {
  Vector mu;  ///< ascending, mu[0] == 0 exactly
  Matrix U;
  Matrix U_inv;
};

/// Throws ValidationError when μ₂ is below the connectivity tolerance,
/// UnsupportedNetwork when two nonzero eigenvalues are closer than
/// 1e-8·μ_max, and NumericError if the zero-mode identities of U and U⁻¹
/// fail by more than 1e-9.
LaplacianSpectrum laplacian_spectrum(const Matrix& laplacian);

/// ẋ = A x + H f(Bᵀθ) + P̄ with x = [θ; p].
struct ClosedLoopSystem {
  Matrix A;     ///< [−L/d, −I/d; −L/(dk), −e I/(dk)]
  Matrix H;     ///< [−BY/d; −BY/(dk)]
  Vector P_bar; ///< [P*/d; P*/(dk)]
};

ClosedLoopSystem closed_loop_system(const MicrogridNetwork& net);

/// Eigenvalues of A in pair order: (0, −e/(dk)), then for each nonzero μ_i
/// the slow root −(e+μk−R)/(2dk) followed by the fast root −(e+μk+R)/(2dk).
struct SystemEigenstructure {
  Vector lambda;
  Matrix V;
};

SystemEigenstructure closed_form_eigs(const LaplacianSpectrum& spectrum, const ControlParams& params);

/// Input/forcing blocks in modal coordinates.
struct ModalTransform {
  Vector gamma;  ///< diag Γ = (e−1, −λ₂, λ₃, −λ₄, …, λ_{2n−1}, −λ_{2n})
  Vector R;      ///< R_i = sqrt(4μ_i k + (e − μ_i k)²)
  Matrix u_h;    ///< R⁻¹U⁻¹BY, n×m
  Vector u_p;    ///< R⁻¹U⁻¹P*
  Matrix U_H;    ///< u_h ⊗ [1;1]
  Vector U_P;    ///< u_p ⊗ [1;1]
};

ModalTransform modal_transform(const LaplacianSpectrum& spectrum, const SystemEigenstructure& eig,
                               const MicrogridNetwork& net);

/// Largest |entry| in the first two columns of Bᵀ·V_θ.
double decoupling_residual(const Matrix& V_theta, const Matrix& B);

/// Numeric confirmation of the closed-form identities. All are absolute
/// unless noted.
struct ModalResiduals {
  double laplacian_eigen = 0.0;      ///< max_j ‖L u_j − μ_j u_j‖∞
  double zero_mode_row = 0.0;        ///< ‖U⁻¹(1,:) − 1ᵀ/n‖∞
  double column_sums = 0.0;          ///< max_{j≥2} |1ᵀ U(:,j)|
  double row_sums = 0.0;             ///< max_{i≥2} |U⁻¹(i,:) 1|
  double eigen = 0.0;                ///< ‖AV − VΛ‖∞ / ‖A‖∞
  double input_transform = 0.0;      ///< ‖V⁻¹H − ΓU_H‖∞ entrywise
  double forcing_transform = 0.0;    ///< rows 3..2n of V⁻¹P̄ + ΓU_P
  double forcing_first_rows = 0.0;   ///< rows 1..2 of V⁻¹P̄ + ΓU_P (diagnostic only)
  double scalar_forcing = 0.0;       ///< rows 1..2 of V⁻¹P̄ vs ((e−1)/(de), 1/(dk))·ΣP*/n
  double decoupling = 0.0;           ///< see decoupling_residual
  double u_h_first_row = 0.0;        ///< ‖u_h(1,:)‖∞
  double u_p_first = 0.0;            ///< |u_p(1) − ΣP*/(ne)|
};

/// Everything the certificate and the simulator need, for one network.
struct ModalDecomposition {
  ControlParams params;
  Matrix B;
  Matrix Y;
  Matrix L;
  LaplacianSpectrum spectrum;
  ClosedLoopSystem system;
  Vector lambda;
  Matrix V;
  Matrix V_inv;
  Matrix V_theta;   ///< top n rows of V
  ModalTransform transform;
  Matrix edge_map;  ///< Bᵀ·V_θ, m × 2n; maps z to line phase differences
  ModalResiduals residuals;

  std::size_t n() const noexcept { return B.rows(); }
  std::size_t m() const noexcept { return B.cols(); }
};

/// Full pipeline. Throws NumericError when a confirmation residual exceeds
/// its tolerance (1e-8 relative for the transform identities, 1e-9 for the
/// Laplacian identities and decoupling).
ModalDecomposition decompose(const MicrogridNetwork& net);

}  // namespace mgc
