#include "mgc/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <string>

namespace mgc {

using nlohmann::json;

double round_sig(double v, int digits) {
  if (v == 0.0) return 0.0;  // also drops negative zero
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  const double r = std::stod(buf);
  return r == 0.0 ? 0.0 : r;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (double v : m.row(i)) row.push_back(round_sig(v));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(std::span<const double> v) {
  json out = json::array();
  for (double x : v) out.push_back(round_sig(x));
  return out;
}

std::string config_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json network_json(const MicrogridNetwork& net) {
  json buses = json::array();
  for (const auto& b : net.buses()) buses.push_back({{"id", b.id}, {"p_star", round_sig(b.p_star)}});
  json lines = json::array();
  for (const auto& l : net.lines())
    lines.push_back({{"from", l.from}, {"to", l.to}, {"a", round_sig(l.weight)}});
  const auto& p = net.params();
  return {{"n", net.n()},
          {"m", net.m()},
          {"params",
           {{"d", round_sig(p.d)}, {"k", round_sig(p.k)}, {"epsilon", round_sig(p.epsilon)},
            {"e", round_sig(p.e())}}},
          {"buses", std::move(buses)},
          {"lines", std::move(lines)}};
}

json modal_json(const ModalDecomposition& dec) {
  const auto& r = dec.residuals;
  const auto& t = dec.transform;
  return {
      {"B", to_json(dec.B)},
      {"Y", to_json(dec.Y)},
      {"L", to_json(dec.L)},
      {"mu", to_json(dec.spectrum.mu)},
      {"U", to_json(dec.spectrum.U)},
      {"U_inv", to_json(dec.spectrum.U_inv)},
      {"Lambda", to_json(dec.lambda)},
      {"V", to_json(dec.V)},
      {"Gamma", to_json(t.gamma)},
      {"R", to_json(t.R)},
      {"u_h", to_json(t.u_h)},
      {"u_p", to_json(t.u_p)},
      {"BtV_theta", to_json(dec.edge_map)},
      {"residuals",
       {{"laplacian_eigen", round_sig(r.laplacian_eigen)},
        {"zero_mode_row", round_sig(r.zero_mode_row)},
        {"column_sums", round_sig(r.column_sums)},
        {"row_sums", round_sig(r.row_sums)},
        {"eigen_relative", round_sig(r.eigen)},
        {"input_transform", round_sig(r.input_transform)},
        {"forcing_transform", round_sig(r.forcing_transform)},
        {"forcing_first_rows", round_sig(r.forcing_first_rows)},
        {"scalar_forcing", round_sig(r.scalar_forcing)},
        {"decoupling", round_sig(r.decoupling)},
        {"u_h_first_row", round_sig(r.u_h_first_row)},
        {"u_p_first", round_sig(r.u_p_first)}}},
  };
}

json certificate_json(const ContractivityCertificate& cert, const UltimateBound* ub) {
  json roots = json::array();
  for (const auto& r : cert.roots) roots.push_back(to_json(r.roots));
  json out = {
      {"g", to_json(cert.g.values())},
      {"gamma", to_json(cert.gamma)},
      {"b", to_json(cert.b)},
      {"up_sq", to_json(cert.up_sq)},
      {"roots", std::move(roots)},
      {"zeta_interval", nullptr},
      {"zeta0", nullptr},
      {"b_z", nullptr},
      {"phase_bounds", nullptr},
      {"iterations", nullptr},
      {"satisfied", cert.satisfied},
  };
  if (cert.zeta_interval)
    out["zeta_interval"] = {round_sig(cert.zeta_interval->lo), round_sig(cert.zeta_interval->hi)};
  if (!cert.diagnostic.empty()) out["diagnostic"] = cert.diagnostic;
  if (ub) {
    out["zeta0"] = round_sig(ub->zeta0);
    out["z_bar0"] = to_json(ub->z_bar0);
    out["b_z"] = to_json(ub->b_z);
    out["phase_bounds"] = to_json(ub->phase_bounds);
    out["iterations"] = ub->iterations;
  }
  return out;
}

json frequency_json(const FrequencyReport& f) {
  return {{"omega_sync_ss", round_sig(f.omega_sync_ss)},
          {"z2_pole", round_sig(f.z2_pole)},
          {"z1_slope", round_sig(f.z1_slope)},
          {"z1_forcing", round_sig(f.z1_forcing)},
          {"z2_forcing", round_sig(f.z2_forcing)}};
}

json validation_json(const std::vector<ValidationReport>& reports) {
  json runs = json::array();
  bool all = true;
  double worst_settling = 0.0;
  for (const auto& r : reports) {
    all = all && r.validated;
    worst_settling = std::max(worst_settling, r.settling_time);
    json run = {{"validated", r.validated},
                {"settling_time", round_sig(r.settling_time)},
                {"z_settling_time", round_sig(r.z_settling_time)},
                {"phase_settling_time", round_sig(r.phase_settling_time)},
                {"max_z_hat_after", to_json(r.max_z_hat_after)},
                {"max_phase_after", to_json(r.max_phase_after)},
                {"max_phase_overall", to_json(r.max_phase_overall)}};
    if (!r.failure.empty()) run["failure"] = r.failure;
    runs.push_back(std::move(run));
  }
  return {{"all_validated", all}, {"max_settling_time", round_sig(worst_settling)}, {"runs", std::move(runs)}};
}

namespace {
void put(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}
}  // namespace

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      put(out, m(i, j));
    }
    out << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& traj) {
  out << "t";
  for (std::size_t i = 1; i <= traj.n; ++i) out << ",theta_" << i;
  for (std::size_t i = 1; i <= traj.n; ++i) out << ",p_" << i;
  for (std::size_t i = 1; i <= 2 * traj.n; ++i) out << ",z_" << i;
  out << ",omega_sync";
  for (std::size_t j = 1; j <= traj.m; ++j) out << ",phase_" << j;
  out << '\n';
  for (const auto& s : traj.samples) {
    put(out, s.t);
    for (const auto* block : {&s.theta, &s.p, &s.z})
      for (double v : *block) {
        out << ',';
        put(out, v);
      }
    out << ',';
    put(out, s.omega_sync);
    for (double v : s.edge_phases) {
      out << ',';
      put(out, v);
    }
    out << '\n';
  }
}

}  // namespace mgc
