#include "mgc/freq.hpp"

#include <numeric>

namespace mgc {

double omega_sync(std::span<const double> theta_dot) {
  if (theta_dot.empty()) return 0.0;
  return std::accumulate(theta_dot.begin(), theta_dot.end(), 0.0) / double(theta_dot.size());
}

double omega_sync_steady_state(const MicrogridNetwork& net) {
  const auto& p = net.params();
  const double de = p.d * p.epsilon;
  return net.p_star_sum() * de / (double(net.n()) * p.d * (1.0 + de));
}

FrequencyReport scalar_subsystem(const MicrogridNetwork& net) {
  const auto& p = net.params();
  const double e = p.e();
  const double mean_p = net.p_star_sum() / double(net.n());
  FrequencyReport r;
  r.omega_sync_ss = omega_sync_steady_state(net);
  r.z2_pole = -e / (p.d * p.k);
  r.z1_forcing = (e - 1.0) / (p.d * e) * mean_p;
  r.z2_forcing = mean_p / (p.d * p.k);
  r.z1_slope = r.z1_forcing;
  return r;
}

}  // namespace mgc
