#include <doctest.h>

#include <sstream>

#include "mgc/report.hpp"
#include "support.hpp"

using namespace mgc;

TEST_CASE("significant-digit rounding") {
  CHECK(round_sig(12.446312) == 12.4463);
  CHECK(round_sig(-0.000123456789) == -0.000123457);
  CHECK(round_sig(0.0) == 0.0);
  CHECK_FALSE(std::signbit(round_sig(-1e-30 * 0.0)));
}

TEST_CASE("config hash is stable and content sensitive") {
  CHECK(config_hash("abc") == config_hash("abc"));
  CHECK(config_hash("abc") != config_hash("abd"));
  CHECK(config_hash("").size() == 16);
}

TEST_CASE("certificate json carries the contract keys") {
  const auto dec = decompose(test::example_network());
  const auto cert = contractivity_check(GVector(test::kG), dec);
  const auto ub = ultimate_bound(cert, 0.0327, dec);
  const auto j = certificate_json(cert, &ub);
  for (const char* key : {"g", "gamma", "b", "up_sq", "zeta_interval", "zeta0", "b_z", "phase_bounds",
                          "iterations", "satisfied"})
    CHECK(j.contains(key));
  CHECK(j["b_z"][2].get<double>() == 0.0739033);
  const auto none = certificate_json(cert, nullptr);
  CHECK(none["b_z"].is_null());
}

TEST_CASE("trajectory csv") {
  const auto net = test::example_network();
  const auto traj = simulate({0.01, 1e-3, {}, 5}, net, decompose(net));
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "t,theta_1,theta_2,theta_3,p_1,p_2,p_3,z_1,z_2,z_3,z_4,z_5,z_6,omega_sync,phase_1,phase_2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
