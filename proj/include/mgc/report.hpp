#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mgc/certify.hpp"
#include "mgc/freq.hpp"
#include "mgc/grid_model.hpp"
#include "mgc/modal.hpp"
#include "mgc/sim.hpp"

namespace mgc {

/// Round to `digits` significant decimal digits (report JSON uses 6).
double round_sig(double v, int digits = 6);

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(std::span<const double> v);

/// FNV-1a 64-bit digest of the config text, as 16 hex digits.
std::string config_hash(std::string_view text);

nlohmann::json network_json(const MicrogridNetwork& net);
nlohmann::json modal_json(const ModalDecomposition& dec);
nlohmann::json certificate_json(const ContractivityCertificate& cert, const UltimateBound* ub);
nlohmann::json frequency_json(const FrequencyReport& freq);
nlohmann::json validation_json(const std::vector<ValidationReport>& reports);

/// Full-precision CSV (17 significant digits), no header.
void write_matrix_csv(std::ostream& out, const Matrix& m);
/// Header row then one line per sample:
/// t, theta_1..n, p_1..n, z_1..2n, omega_sync, phase_1..m.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& traj);

}  // namespace mgc
