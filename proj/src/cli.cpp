#include "mgc/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mgc/errors.hpp"
#include "mgc/freq.hpp"
#include "mgc/grid_model.hpp"
#include "mgc/modal.hpp"
#include "mgc/report.hpp"
#include "mgc/sim.hpp"

namespace mgc::cli {

using nlohmann::json;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("MGC_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
  }
  return kDefaultSeed;
}

Vector parse_list(const std::string& text) {
  Vector out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("cannot parse number '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ValidationError("cannot parse number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const json& doc, std::ostream& out) { out << doc.dump(2) << '\n'; }

struct Certified {
  ContractivityCertificate cert;
  std::optional<UltimateBound> bound;
  std::optional<OptimizeResult> optimizer;
};

Certified run_certify(const ModalDecomposition& dec, const CertifyFlags& flags) {
  std::optional<OptimizeResult> opt;
  GVector g = flags.g ? GVector(*flags.g) : GVector(Vector(dec.n() - 1, 1.0));
  if (!flags.g) {
    OptimizeOptions o;
    o.objective = flags.objective;
    o.seed = flags.seed;
    opt = optimize_g(dec, o);
    g = opt->g;
  }
  Certified c{contractivity_check(g, dec), std::nullopt, opt};
  if (c.cert.satisfied) {
    const double z0 = flags.zeta0 ? *flags.zeta0 : default_zeta0(c.cert);
    c.bound = ultimate_bound(c.cert, z0, dec);
  }
  return c;
}

json optimizer_json(const OptimizeResult& r) {
  return {{"objective", round_sig(r.objective)},
          {"min_b", round_sig(r.min_b)},
          {"min_margin", round_sig(r.min_margin)},
          {"best_start_objective", round_sig(r.best_start_objective)},
          {"improved", r.improved},
          {"evaluations", r.evaluations}};
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::NumericFailure);
  }
}

Vector read_state_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  Vector out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out.push_back(std::stod(cell));
      } catch (const std::exception&) {
        if (out.empty()) break;  // header row
        throw ConfigError("x0 csv: cannot parse '" + cell + "'");
      }
    }
  }
  return out;
}

}  // namespace

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_text(opt.config);
    const auto net = load_network(text);
    const auto dec = decompose(net);
    json doc = {{"config_hash", config_hash(text)},
                {"network", network_json(net)},
                {"modal", modal_json(dec)}};
    emit(doc, out);
    if (opt.csv_dir) {
      std::filesystem::create_directories(*opt.csv_dir);
      auto dump = [&](const char* name, const Matrix& m) {
        std::ofstream f(*opt.csv_dir / (std::string(name) + ".csv"));
        write_matrix_csv(f, m);
      };
      auto dump_vec = [&](const char* name, const Vector& v) { dump(name, Matrix::diagonal(v)); };
      dump("B", dec.B);
      dump("Y", dec.Y);
      dump("L", dec.L);
      dump("U", dec.spectrum.U);
      dump("V", dec.V);
      dump("V_inv", dec.V_inv);
      dump("u_h", dec.transform.u_h);
      dump("BtV_theta", dec.edge_map);
      dump_vec("M", dec.spectrum.mu);
      dump_vec("Lambda", dec.lambda);
      dump_vec("Gamma", dec.transform.gamma);
      dump_vec("R", dec.transform.R);
      Matrix up(dec.n(), 1);
      up.set_col(0, dec.transform.u_p);
      dump("u_p", up);
    }
    return 0;
  });
}

int cmd_certify(const std::filesystem::path& config, const CertifyFlags& flags, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_text(config);
    const auto net = load_network(text);
    const auto dec = decompose(net);
    const auto c = run_certify(dec, flags);
    json doc = certificate_json(c.cert, c.bound ? &*c.bound : nullptr);
    if (c.optimizer) doc["optimizer"] = optimizer_json(*c.optimizer);
    emit(doc, out);
    if (!c.cert.satisfied) {
      err << "contractivity condition not satisfied: " << c.cert.diagnostic << '\n';
      return static_cast<int>(ExitCode::CertificateUnsatisfied);
    }
    return 0;
  });
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto net = load_network(read_text(opt.config));
    const auto dec = decompose(net);
    SimConfig cfg{opt.t_final, opt.dt, {}, opt.stride};
    const int sources = int(bool(opt.x0_csv)) + int(bool(opt.modal)) + int(opt.random_admissible);
    if (sources > 1) throw ValidationError("choose at most one of --x0, --modal, --random-admissible");
    if (opt.x0_csv) cfg.x0 = read_state_csv(*opt.x0_csv);
    if (opt.modal) {
      if (opt.modal->size() != 2 * net.n()) throw ValidationError("--modal needs 2n values");
      cfg.x0 = modal_to_state(*opt.modal, dec);
    }
    if (opt.random_admissible) {
      const auto c = run_certify(dec, opt.certify);
      if (!c.bound) throw CertificateError("no certificate: " + c.cert.diagnostic);
      // Skip the deterministic corners, draw the first interior sample.
      const std::size_t corners = std::size_t{1} << std::min<std::size_t>(c.bound->z_bar0.size(), 20);
      cfg.x0 = modal_to_state(admissible_starts(*c.bound, corners + 1, opt.certify.seed).back(), dec);
    }
    const auto traj = simulate(cfg, net, dec);
    if (opt.out) {
      std::ofstream f(*opt.out);
      if (!f) throw ConfigError("cannot write '" + opt.out->string() + "'");
      write_trajectory_csv(f, traj);
    } else {
      write_trajectory_csv(out, traj);
    }
    return 0;
  });
}

int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string text = read_text(opt.config);
    const auto net = load_network(text);
    const auto dec = decompose(net);
    const auto c = run_certify(dec, opt.certify);
    const auto freq = scalar_subsystem(net);

    json doc = {{"tool", "microgrid-cert"},
                {"version", MGC_VERSION},
                {"config_hash", config_hash(text)},
                {"seed", opt.certify.seed},
                {"network", network_json(net)},
                {"modal", modal_json(dec)},
                {"certificate", certificate_json(c.cert, c.bound ? &*c.bound : nullptr)},
                {"frequency", frequency_json(freq)},
                {"validation", nullptr}};
    if (c.optimizer) doc["certificate"]["optimizer"] = optimizer_json(*c.optimizer);

    int code = 0;
    if (!c.cert.satisfied) {
      err << "contractivity condition not satisfied: " << c.cert.diagnostic << '\n';
      code = static_cast<int>(ExitCode::CertificateUnsatisfied);
    }
    if (opt.validate && c.bound) {
      SimConfig base{opt.t_final, opt.dt, {}, 10};
      const auto starts = admissible_starts(*c.bound, opt.samples, opt.certify.seed);
      const auto reports = validate_batch(net, dec, *c.bound, starts, base);
      doc["validation"] = validation_json(reports);
      if (!doc["validation"]["all_validated"].get<bool>()) {
        err << "simulation contradicts the certificate\n";
        code = static_cast<int>(ExitCode::CertificateUnsatisfied);
      }
    }

    if (opt.plot_dir) {
      std::filesystem::create_directories(*opt.plot_dir);
      SimConfig cfg{opt.plot_t_final, opt.dt, {}, 10};
      const auto traj = simulate(cfg, net, dec);
      std::ofstream ph(*opt.plot_dir / "phases.csv");
      ph << "t";
      for (std::size_t j = 1; j <= net.m(); ++j) ph << ",phase_" << j;
      if (c.bound)
        for (std::size_t j = 1; j <= net.m(); ++j) ph << ",bound_" << j;
      ph << '\n';
      std::ofstream om(*opt.plot_dir / "omega_sync.csv");
      om << "t,omega_sync,omega_sync_ss\n";
      char buf[64];
      for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf, "%.17g", s.t);
        ph << buf;
        om << buf;
        for (double v : s.edge_phases) {
          std::snprintf(buf, sizeof buf, ",%.17g", v);
          ph << buf;
        }
        if (c.bound)
          for (double v : c.bound->phase_bounds) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            ph << buf;
          }
        ph << '\n';
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", s.omega_sync, freq.omega_sync_ss);
        om << buf;
      }
      std::ofstream tr(*opt.plot_dir / "trajectory.csv");
      write_trajectory_csv(tr, traj);
    }

    if (opt.out) {
      std::ofstream f(*opt.out);
      if (!f) throw ConfigError("cannot write '" + opt.out->string() + "'");
      emit(doc, f);
    } else {
      emit(doc, out);
    }
    return code;
  });
}

}  // namespace mgc::cli
