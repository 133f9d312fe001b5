#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "mgc/certify.hpp"
#include "mgc/matrix.hpp"

namespace mgc::cli {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Seed from MGC_SEED when set and parseable, otherwise 42.
std::uint64_t default_seed();

struct CertifyFlags {
  std::optional<Vector> g;        ///< explicit weights; optimizer used otherwise
  std::optional<double> zeta0;    ///< default: geometric midpoint of the interval
  Objective objective = Objective::MinB;
  std::uint64_t seed = kDefaultSeed;
};

struct AnalyzeOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> csv_dir;
};

struct SimulateOptions {
  std::filesystem::path config;
  double t_final = 20.0;
  double dt = 1e-3;
  std::size_t stride = 1;
  std::optional<std::filesystem::path> x0_csv;
  std::optional<Vector> modal;  ///< 2n modal coordinates
  bool random_admissible = false;
  CertifyFlags certify;          ///< used by random_admissible
  std::optional<std::filesystem::path> out;
};

struct ReportOptions {
  std::filesystem::path config;
  CertifyFlags certify;
  bool validate = true;
  std::size_t samples = 20;
  double t_final = 60.0;
  double dt = 1e-3;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> plot_dir;
  double plot_t_final = 20.0;
};

/// Each command writes its JSON (or CSV) to `out`, diagnostics to `err`, and
/// returns the process exit code.
int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);
int cmd_certify(const std::filesystem::path& config, const CertifyFlags& flags, std::ostream& out,
                std::ostream& err);
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
int cmd_report(const ReportOptions& opt, std::ostream& out, std::ostream& err);

/// Parses "v1,v2,..." into numbers; throws ValidationError.
Vector parse_list(const std::string& text);

}  // namespace mgc::cli
