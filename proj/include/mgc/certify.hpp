#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mgc/matrix.hpp"
#include "mgc/modal.hpp"
#include "mgc/spectral.hpp"

namespace mgc {

/// Positive mode weights g_1..g_{n−1}. The full weight vector is
/// G = [1, 1, g_1, g_1, …, g_{n−1}, g_{n−1}], every g_i duplicated.
class GVector {
 public:
  explicit GVector(Vector g);

  const Vector& values() const noexcept { return g_; }
  std::size_t size() const noexcept { return g_.size(); }
  double operator[](std::size_t i) const { return g_[i]; }
  /// Length 2n.
  Vector full() const;
  /// G without its first two entries, length 2n−2.
  Vector tail() const;

 private:
  Vector g_;
};

/// F(ẑ) = (|BᵀV_θ|·|[0;0;ẑ]|)³/6, one entry per line. ẑ has length 2n−2.
Vector cni_bound_F(std::span<const double> z_hat, const ModalDecomposition& dec);

/// T(ẑ) = |Û_H|·F(ẑ) + |Û_P|, where the hats drop the first two rows.
Vector t_map(std::span<const double> z_hat, const ModalDecomposition& dec);

/// γ_i = |u_h(i+1,:)|·(|BᵀV_θ|G)³/6. Throws NumericError if any γ_i ≤ 1e-15.
Vector gamma_coeffs(const GVector& g, const ModalDecomposition& dec);

struct ZetaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double z) const noexcept { return lo < z && z < hi; }
};

struct ContractivityCertificate {
  GVector g;
  Vector gamma;
  Vector b;      ///< 4g_i³/(27γ_i)
  Vector up_sq;  ///< u_p(i+1)²
  /// Real roots of γ_i ζ³ − g_i ζ + |u_p(i+1)|, per mode.
  std::vector<CubicRoots> roots;
  /// Per-mode open interval between the two nonnegative roots (empty when
  /// the mode fails the condition).
  std::vector<std::optional<ZetaInterval>> mode_intervals;
  std::optional<ZetaInterval> zeta_interval;
  bool satisfied = false;
  std::string diagnostic;
};

ContractivityCertificate contractivity_check(const GVector& g, const ModalDecomposition& dec);

enum class Objective {
  MinB,    ///< max min_i b_i, ties broken by the margin
  Margin,  ///< max min_i (b_i − u_p(i+1)²)
};

struct OptimizeOptions {
  Objective objective = Objective::MinB;
  int random_starts = 20;
  int max_evaluations = 2000;  ///< per start
  std::uint64_t seed = 42;
};

struct OptimizeResult {
  GVector g;
  double objective = 0.0;      ///< value of the selected objective at g
  double min_b = 0.0;
  double min_margin = 0.0;
  double best_start_objective = 0.0;
  bool improved = false;       ///< false: no start was improved upon (warning)
  int evaluations = 0;
};

/// Value of `objective` at g.
double g_objective(const GVector& g, const ModalDecomposition& dec, Objective objective);

/// Nelder–Mead on log g from one start at g = 1 plus `random_starts`
/// seeded starts; starts run concurrently and are reduced in order.
OptimizeResult optimize_g(const ModalDecomposition& dec, const OptimizeOptions& options = {});

struct UltimateBound {
  double zeta0 = 0.0;
  Vector z_bar0;        ///< G(3:2n)·ζ₀
  Vector b_z;           ///< limit of T-iterates from z_bar0, length 2n−2
  Vector phase_bounds;  ///< per line
  int iterations = 0;
};

/// sqrt(lo·hi) of the certified interval, or hi/2 when lo is 0.
double default_zeta0(const ContractivityCertificate& cert);

/// Iterates T from G(3:2n)·ζ₀ until ‖T^{k+1} − T^k‖∞ ≤ 1e-10(1 + ‖T^k‖∞).
/// Throws CertificateError if the certificate is unsatisfied, ζ₀ lies
/// outside its interval or T(z̄₀) < z̄₀ fails; NumericError if an iterate
/// increases or 10000 iterations pass.
UltimateBound ultimate_bound(const ContractivityCertificate& cert, double zeta0,
                             const ModalDecomposition& dec);

/// Row j of |BᵀV_θ| without its first two columns, times b_z.
Vector phase_bounds(std::span<const double> b_z, const ModalDecomposition& dec);

}  // namespace mgc
