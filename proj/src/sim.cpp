#include "mgc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "mgc/errors.hpp"
#include "mgc/freq.hpp"

namespace mgc {

Vector electrical_injections(std::span<const double> theta, const MicrogridNetwork& net) {
  Vector pe(net.n(), 0.0);
  for (std::size_t j = 0; j < net.m(); ++j) {
    const std::size_t a = net.from_index(j);
    const std::size_t b = net.to_index(j);
    const double flow = net.lines()[j].weight * std::sin(theta[a] - theta[b]);
    pe[a] += flow;
    pe[b] -= flow;
  }
  return pe;
}

Vector rhs(std::span<const double> x, const MicrogridNetwork& net) {
  const std::size_t n = net.n();
  if (x.size() != 2 * n) throw std::invalid_argument("rhs: state must have length 2n");
  const auto& prm = net.params();
  const Vector pe = electrical_injections(x.first(n), net);
  Vector dx(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta_dot = (net.buses()[i].p_star - pe[i] - x[n + i]) / prm.d;
    dx[i] = theta_dot;
    dx[n + i] = (theta_dot - prm.epsilon * x[n + i]) / prm.k;
  }
  return dx;
}

Vector modal_to_state(std::span<const double> z, const ModalDecomposition& dec) { return dec.V * z; }

namespace {

void rk4_step(Vector& x, double h, const MicrogridNetwork& net) {
  const std::size_t len = x.size();
  Vector tmp(len);
  const Vector k1 = rhs(x, net);
  for (std::size_t i = 0; i < len; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  const Vector k2 = rhs(tmp, net);
  for (std::size_t i = 0; i < len; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  const Vector k3 = rhs(tmp, net);
  for (std::size_t i = 0; i < len; ++i) tmp[i] = x[i] + h * k3[i];
  const Vector k4 = rhs(tmp, net);
  for (std::size_t i = 0; i < len; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

Vector initial_state(const SimConfig& cfg, const MicrogridNetwork& net) {
  if (!(cfg.dt > 0.0)) throw ValidationError("simulation dt must be positive");
  if (!(cfg.t_final >= cfg.dt)) throw ValidationError("simulation t_final must be at least dt");
  if (cfg.record_stride == 0) throw ValidationError("record stride must be positive");
  if (cfg.x0.empty()) return Vector(2 * net.n(), 0.0);
  if (cfg.x0.size() != 2 * net.n()) throw ValidationError("initial state must have 2n entries");
  return cfg.x0;
}

std::size_t step_count(const SimConfig& cfg) {
  return static_cast<std::size_t>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
}

// Advances x by step `s` (0-based) of the grid, returning the new time.
double advance(Vector& x, std::size_t s, std::size_t steps, const SimConfig& cfg,
               const MicrogridNetwork& net) {
  const double t0 = double(s) * cfg.dt;
  const double t1 = (s + 1 == steps) ? cfg.t_final : double(s + 1) * cfg.dt;
  rk4_step(x, t1 - t0, net);
  for (double v : x)
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "simulation diverged at t = " << t1;
      throw SimulationDiverged(t1, msg.str());
    }
  return t1;
}

TrajectorySample sample_at(double t, const Vector& x, const MicrogridNetwork& net,
                           const ModalDecomposition& dec, double& residual) {
  const std::size_t n = net.n();
  TrajectorySample s;
  s.t = t;
  s.theta.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  s.p.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
  s.z = dec.V_inv * x;
  const Vector back = dec.V * s.z;
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(back[i] - x[i]));
  residual = std::max(residual, r / std::max(1.0, norm_inf(x)));
  const Vector dx = rhs(x, net);
  s.omega_sync = omega_sync(std::span<const double>(dx).first(n));
  s.edge_phases.resize(net.m());
  for (std::size_t j = 0; j < net.m(); ++j)
    s.edge_phases[j] = x[net.from_index(j)] - x[net.to_index(j)];
  return s;
}

}  // namespace

TrajectoryRecord simulate(const SimConfig& cfg, const MicrogridNetwork& net,
                          const ModalDecomposition& dec) {
  Vector x = initial_state(cfg, net);
  TrajectoryRecord rec;
  rec.n = net.n();
  rec.m = net.m();
  const std::size_t steps = step_count(cfg);
  rec.samples.reserve(steps / cfg.record_stride + 2);
  rec.samples.push_back(sample_at(0.0, x, net, dec, rec.max_reconstruction_residual));
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = advance(x, s, steps, cfg, net);
    if ((s + 1) % cfg.record_stride == 0 || s + 1 == steps)
      rec.samples.push_back(sample_at(t, x, net, dec, rec.max_reconstruction_residual));
  }
  if (rec.max_reconstruction_residual > 1e-9)
    throw NumericError("simulate: modal reconstruction residual exceeds 1e-9");
  return rec;
}

Vector integrate(const SimConfig& cfg, const MicrogridNetwork& net) {
  Vector x = initial_state(cfg, net);
  const std::size_t steps = step_count(cfg);
  for (std::size_t s = 0; s < steps; ++s) advance(x, s, steps, cfg, net);
  return x;
}

double step_halving_error(const SimConfig& cfg, const MicrogridNetwork& net) {
  SimConfig half = cfg;
  half.dt = cfg.dt / 2.0;
  const Vector a = integrate(cfg, net);
  const Vector b = integrate(half, net);
  const std::size_t n = net.n();
  double diff = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

double step_halving_ratio(const SimConfig& cfg, const MicrogridNetwork& net) {
  SimConfig half = cfg;
  half.dt = cfg.dt / 2.0;
  SimConfig quarter = cfg;
  quarter.dt = cfg.dt / 4.0;
  const Vector a = integrate(cfg, net);
  const Vector b = integrate(half, net);
  const Vector c = integrate(quarter, net);
  double coarse = 0.0;
  double fine = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    coarse = std::max(coarse, std::abs(a[i] - b[i]));
    fine = std::max(fine, std::abs(b[i] - c[i]));
  }
  return coarse / fine;
}

ValidationReport validate_certificate(const TrajectoryRecord& traj, const UltimateBound& ub, double tol) {
  ValidationReport rep;
  const std::size_t count = traj.samples.size();
  const std::size_t zdim = ub.b_z.size();
  constexpr double kFloor = 1e-12;
  if (count == 0) {
    rep.failure = "empty trajectory";
    return rep;
  }

  // One past the last violating sample, per condition.
  std::size_t z_start = 0;
  std::size_t phase_start = 0;
  rep.max_phase_overall.assign(traj.m, 0.0);
  for (std::size_t s = 0; s < count; ++s) {
    const auto& smp = traj.samples[s];
    for (std::size_t i = 0; i < zdim; ++i)
      if (std::abs(smp.z[i + 2]) > ub.b_z[i] * (1.0 + tol) + kFloor) z_start = s + 1;
    for (std::size_t j = 0; j < traj.m; ++j) {
      const double ph = std::abs(smp.edge_phases[j]);
      rep.max_phase_overall[j] = std::max(rep.max_phase_overall[j], ph);
      if (ph > ub.phase_bounds[j] + kFloor) phase_start = s + 1;
    }
  }

  const std::size_t start = std::max(z_start, phase_start);
  auto time_of = [&](std::size_t idx) { return idx < count ? traj.samples[idx].t : traj.samples.back().t; };
  rep.z_settling_time = time_of(z_start);
  rep.phase_settling_time = time_of(phase_start);
  rep.settling_time = time_of(start);
  if (z_start >= count) rep.failure = "modal states exceed (1+tol)*b_z at the end of the record";
  if (phase_start >= count) {
    if (!rep.failure.empty()) rep.failure += "; ";
    rep.failure += "edge phases exceed their bounds at the end of the record";
  }

  rep.max_z_hat_after.assign(zdim, 0.0);
  rep.max_phase_after.assign(traj.m, 0.0);
  for (std::size_t s = std::min(start, count - 1); s < count; ++s) {
    const auto& smp = traj.samples[s];
    for (std::size_t i = 0; i < zdim; ++i)
      rep.max_z_hat_after[i] = std::max(rep.max_z_hat_after[i], std::abs(smp.z[i + 2]));
    for (std::size_t j = 0; j < traj.m; ++j)
      rep.max_phase_after[j] = std::max(rep.max_phase_after[j], std::abs(smp.edge_phases[j]));
  }
  rep.validated = rep.failure.empty();
  return rep;
}

std::vector<Vector> admissible_starts(const UltimateBound& ub, std::size_t count, std::uint64_t seed) {
  const std::size_t zdim = ub.z_bar0.size();
  std::vector<Vector> out;
  const std::size_t corners = zdim >= 20 ? count : std::min<std::size_t>(count, std::size_t{1} << zdim);
  for (std::size_t c = 0; c < corners; ++c) {
    Vector z(zdim + 2, 0.0);
    for (std::size_t i = 0; i < zdim; ++i) z[i + 2] = ((c >> i) & 1U) ? ub.z_bar0[i] : -ub.z_bar0[i];
    out.push_back(std::move(z));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  while (out.size() < count) {
    Vector z(zdim + 2, 0.0);
    for (std::size_t i = 0; i < zdim; ++i) z[i + 2] = unif(rng) * ub.z_bar0[i];
    out.push_back(std::move(z));
  }
  return out;
}

std::vector<ValidationReport> validate_batch(const MicrogridNetwork& net, const ModalDecomposition& dec,
                                             const UltimateBound& ub,
                                             const std::vector<Vector>& modal_starts,
                                             const SimConfig& base) {
  std::vector<std::future<ValidationReport>> jobs;
  for (const auto& z0 : modal_starts) {
    jobs.push_back(std::async(std::launch::async, [&net, &dec, &ub, base, z0] {
      SimConfig cfg = base;
      cfg.x0 = modal_to_state(z0, dec);
      try {
        return validate_certificate(simulate(cfg, net, dec), ub);
      } catch (const SimulationDiverged& e) {
        ValidationReport rep;
        rep.failure = e.what();
        return rep;
      }
    }));
  }
  std::vector<ValidationReport> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace mgc
