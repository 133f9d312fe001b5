#pragma once

#include <span>

#include "mgc/grid_model.hpp"

namespace mgc {

/// Frequency-deviation summary of the two scalar modes (z₁, z₂).
struct FrequencyReport {
  double omega_sync_ss = 0.0;  ///< (ΣP*)·dε / (n·d·(1 + dε))
  double z2_pole = 0.0;        ///< −e/(dk)
  double z1_slope = 0.0;       ///< (e−1)·ΣP*/(n·d·e)
  double z1_forcing = 0.0;     ///< (e−1)/(de) · ΣP*/n
  double z2_forcing = 0.0;     ///< 1/(dk) · ΣP*/n
};

/// Average frequency deviation, mean of θ̇ (uniform droop gains).
double omega_sync(std::span<const double> theta_dot);

double omega_sync_steady_state(const MicrogridNetwork& net);

FrequencyReport scalar_subsystem(const MicrogridNetwork& net);

}  // namespace mgc
