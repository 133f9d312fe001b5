#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MGC_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const char* name) { return std::string(MGC_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli analyze") {
  const auto ok = run("analyze " + data("example3.json"));
  REQUIRE(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  const std::vector<double> lambda = j["modal"]["Lambda"];
  const std::vector<double> expect{0, -2, -0.6641, -3.9770, -0.9126, -12.4463};
  for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(lambda[i] - expect[i]) <= 5e-5);

  CHECK(run("analyze " + data("minimal2.json")).code == 0);
  CHECK(run("analyze " + data("disconnected.json")).code == 2);
  CHECK(run("analyze /nonexistent.json").code == 2);
  CHECK(run("analyze").code == 1);
  CHECK(run("bogus").code == 1);
}

TEST_CASE("cli certify") {
  const auto r = run("certify " + data("example3.json") + " --g 8.0377,6.4202 --zeta0 0.0327");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const std::vector<double> bz = j["b_z"], ph = j["phase_bounds"];
  CHECK(std::abs(bz[0] - 0.0481) <= 5e-5);
  CHECK(std::abs(bz[2] - 0.0739) <= 5e-5);
  CHECK(std::abs(ph[0] - 0.2331) <= 5e-5);
  CHECK(std::abs(ph[1] - 0.2023) <= 5e-5);

  const auto eq = run("certify " + data("equal_pstar.json"));
  CHECK(eq.code == 0);
  CHECK(nlohmann::json::parse(eq.out)["up_sq"][0].get<double>() == 0.0);
  CHECK(run("certify " + data("example3_p100.json")).code == 3);
  CHECK(run("certify " + data("example3.json") + " --g 1,-2").code == 2);
  CHECK(run("certify " + data("example3.json") + " --g 1,1 --optimize").code == 1);
}

TEST_CASE("cli report frequency section and determinism") {
  const auto a = run("report " + data("example3.json") + " --samples 4");
  const auto b = run("report " + data("example3.json") + " --samples 4");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j["frequency"]["omega_sync_ss"].get<double>() == 1.0);
  CHECK(j["tool"] == "microgrid-cert");
  CHECK(j["validation"]["all_validated"].get<bool>());

  const auto eps = run("report " + data("example3_eps01.json") + " --no-validate");
  CHECK(nlohmann::json::parse(eps.out)["frequency"]["omega_sync_ss"].get<double>() == 0.181818);
  CHECK(run("report " + data("example3_p100.json") + " --no-validate").code == 3);
}

TEST_CASE("cli simulate and seed") {
  const std::string out = "/tmp/mgc_cli_traj.csv";
  REQUIRE(run("simulate " + data("example3.json") + " --t-final 1 --stride 100 --out " + out).code == 0);
  const auto text = slurp(out);
  CHECK(text.rfind("t,theta_1", 0) == 0);
  const auto m = run("simulate " + data("example3.json") + " --t-final 0.1 --modal 0,0,0.1,0.1,0.1");
  CHECK(m.code == 2);
  const auto s1 = run("simulate " + data("example3.json") + " --t-final 0.1 --random-admissible --seed 3");
  const auto s2 = run("simulate " + data("example3.json") + " --t-final 0.1 --random-admissible --seed 3");
  const auto s3 = run("simulate " + data("example3.json") + " --t-final 0.1 --random-admissible --seed 4");
  CHECK(s1.code == 0);
  CHECK(s1.out == s2.out);
  CHECK(s1.out != s3.out);
  const auto env = run("simulate " + data("example3.json") + " --t-final 0.1 --random-admissible");
  setenv("MGC_SEED", "3", 1);
  const auto env3 = run("simulate " + data("example3.json") + " --t-final 0.1 --random-admissible");
  unsetenv("MGC_SEED");
  CHECK(env3.out == s1.out);
  CHECK(env.out != s1.out);
}
