#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mgc/certify.hpp"
#include "mgc/errors.hpp"
#include "mgc/grid_model.hpp"
#include "mgc/modal.hpp"

namespace mgc {

/// dθ_i/dt = (P*_i − Σ_j a_ij sin(θ_i − θ_j) − p_i)/d,  dp_i/dt = (dθ_i/dt − ε p_i)/k.
/// x = [θ; p].
Vector rhs(std::span<const double> x, const MicrogridNetwork& net);

/// Electrical injections P_e,i = Σ_j a_ij sin(θ_i − θ_j).
Vector electrical_injections(std::span<const double> theta, const MicrogridNetwork& net);

struct SimConfig {
  double t_final = 20.0;
  double dt = 1e-3;
  Vector x0;  ///< 2n state [θ; p]; empty means zero
  std::size_t record_stride = 1;
};

/// x = V·z.
Vector modal_to_state(std::span<const double> z, const ModalDecomposition& dec);

struct TrajectorySample {
  double t = 0.0;
  Vector theta;
  Vector p;
  Vector z;  ///< V⁻¹x
  double omega_sync = 0.0;
  Vector edge_phases;  ///< θ_from − θ_to per line
};

struct TrajectoryRecord {
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<TrajectorySample> samples;
  double max_reconstruction_residual = 0.0;  ///< max ‖x − Vz‖∞ / max(1, ‖x‖∞)
};

/// Thrown when the state stops being finite.
class SimulationDiverged : public NumericError {
 public:
  SimulationDiverged(double t, const std::string& what) : NumericError(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Fixed-step classical RK4. The last step is shortened so the final sample
/// lands on t_final; samples are taken every record_stride steps and at the end.
TrajectoryRecord simulate(const SimConfig& cfg, const MicrogridNetwork& net,
                          const ModalDecomposition& dec);

/// Final state only, no recording.
Vector integrate(const SimConfig& cfg, const MicrogridNetwork& net);

/// ‖θ_dt − θ_{dt/2}‖∞ / max(1, ‖θ_{dt/2}‖∞) at t_final.
double step_halving_error(const SimConfig& cfg, const MicrogridNetwork& net);

/// ‖x_dt − x_{dt/2}‖∞ / ‖x_{dt/2} − x_{dt/4}‖∞ at t_final; ≈ 16 for a
/// fourth-order method in its asymptotic range.
double step_halving_ratio(const SimConfig& cfg, const MicrogridNetwork& net);

struct ValidationReport {
  bool validated = false;
  /// First sample time after which both |ẑ| ≤ (1+tol)·b_z and every edge
  /// phase ≤ its bound hold for the rest of the record.
  double settling_time = 0.0;
  double z_settling_time = 0.0;      ///< ẑ condition alone
  double phase_settling_time = 0.0;  ///< phase condition alone
  Vector max_z_hat_after;            ///< max |ẑ_i| over t ≥ settling_time
  Vector max_phase_after;            ///< max |θ_i − θ_j| over t ≥ settling_time
  Vector max_phase_overall;
  std::string failure;
};

inline constexpr double kBoundTolerance = 0.05;

ValidationReport validate_certificate(const TrajectoryRecord& traj, const UltimateBound& ub,
                                      double tol = kBoundTolerance);

/// Modal starts with z₁ = z₂ = 0 and ẑ(0) in the box |ẑ| ≤ z̄₀: box corners
/// first (bit order), then seeded uniform interior points.
std::vector<Vector> admissible_starts(const UltimateBound& ub, std::size_t count, std::uint64_t seed);

/// Simulates every start concurrently and validates each against `ub`.
std::vector<ValidationReport> validate_batch(const MicrogridNetwork& net, const ModalDecomposition& dec,
                                             const UltimateBound& ub,
                                             const std::vector<Vector>& modal_starts,
                                             const SimConfig& base);

}  // namespace mgc
