#include <doctest.h>

#include <random>

#include "mgc/certify.hpp"
#include "mgc/sim.hpp"
#include "support.hpp"

using namespace mgc;
using test::max_diff;

TEST_CASE("rhs: equilibrium and matrix form") {
  const auto zero = test::example_network({0, 0, 0});
  CHECK(norm_inf(rhs(Vector(6, 0.0), zero)) == 0.0);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = test::random_network(rng, 7);
    const auto sys = closed_loop_system(r.net);
    const std::size_t n = r.net.n();
    Vector x(2 * n);
    for (auto& v : x) v = u(rng);
    const Vector theta(x.begin(), x.begin() + n);
    Vector s = r.dec.B.transpose() * theta;
    for (auto& v : s) v = std::sin(v) - v;
    Vector expect = sys.A * x;
    const Vector hf = sys.H * s;
    for (std::size_t i = 0; i < 2 * n; ++i) expect[i] += hf[i] + sys.P_bar[i];
    CHECK(max_diff(rhs(x, r.net), expect) <= 1e-12 * std::max(1.0, norm_inf(expect)));

    double total = 0.0;
    for (double p : electrical_injections(theta, r.net)) total += p;
    CHECK(std::abs(total) <= 1e-12);
  }
}

TEST_CASE("zero setpoints from rest stay at rest") {
  const auto net = test::example_network({0, 0, 0});
  const auto traj = simulate({5.0, 1e-2, {}, 1}, net, decompose(net));
  for (const auto& s : traj.samples) {
    CHECK(norm_inf(s.theta) == 0.0);
    CHECK(norm_inf(s.p) == 0.0);
  }
}

TEST_CASE("frequency converges from rest") {
  const auto net = test::example_network();
  const auto traj = simulate({20.0, 1e-3, {}, 1000}, net, decompose(net));
  CHECK(traj.samples.back().t == 20.0);
  CHECK(traj.samples.back().omega_sync == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(traj.max_reconstruction_residual <= 1e-9);
  CHECK_THROWS_AS(simulate({1.0, 0.0, {}, 1}, net, decompose(net)), ValidationError);
}

TEST_CASE("linear regime matches the diagonal modal solution") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1e-6, 1e-6);
  for (int trial = 0; trial < 5; ++trial) {
    auto r = test::random_network(rng, 6, 0.0);
    const std::size_t N = 2 * r.net.n();
    Vector z0(N);
    for (auto& v : z0) v = u(rng);
    SimConfig cfg{3.0, 1e-3, modal_to_state(z0, r.dec), 100};
    const auto traj = simulate(cfg, r.net, r.dec);
    for (const auto& s : traj.samples)
      for (std::size_t j = 0; j < N; ++j) CHECK(std::abs(s.z[j] - z0[j] * std::exp(r.dec.lambda[j] * s.t)) <= 1e-9);
  }
}

TEST_CASE("oscillatory modes ignore the scalar pair") {
  const auto net = test::example_network();
  const auto dec = decompose(net);
  const Vector base{0, 0, 0.05, -0.03, 0.02, 0.04};
  Vector shifted = base;
  shifted[0] = 0.7;
  shifted[1] = -0.4;
  const auto a = simulate({10.0, 1e-3, modal_to_state(base, dec), 100}, net, dec);
  const auto b = simulate({10.0, 1e-3, modal_to_state(shifted, dec), 100}, net, dec);
  REQUIRE(a.samples.size() == b.samples.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < a.samples.size(); ++k)
    for (std::size_t j = 2; j < 6; ++j) worst = std::max(worst, std::abs(a.samples[k].z[j] - b.samples[k].z[j]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("RK4 step-halving ratio") {
  const auto net = test::example_network();
  const auto dec = decompose(net);
  SimConfig cfg{5.0, 0.02, modal_to_state(Vector{0, 0, 0.2, -0.2, 0.2, 0.2}, dec), 1};
  const double ratio = step_halving_ratio(cfg, net);
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
  cfg.dt = 1e-3;
  CHECK(step_halving_error(cfg, net) <= 1e-10);
}

TEST_CASE("validation of the certificate") {
  const auto net = test::example_network();
  const auto dec = decompose(net);
  const auto cert = contractivity_check(GVector(test::kG), dec);
  const auto ub = ultimate_bound(cert, 0.0327, dec);

  const auto starts = admissible_starts(ub, 20, 42);
  REQUIRE(starts.size() == 20);
  for (const auto& z : starts) {
    CHECK(z[0] == 0.0);
    CHECK(z[1] == 0.0);
    for (std::size_t i = 2; i < z.size(); ++i) CHECK(std::abs(z[i]) <= ub.z_bar0[i - 2]);
  }
  CHECK(admissible_starts(ub, 20, 42) == starts);

  const auto reports = validate_batch(net, dec, ub, starts, {60.0, 1e-3, {}, 10});
  for (const auto& rep : reports) {
    CHECK(rep.validated);
    CHECK(rep.settling_time < 50.0);
    for (std::size_t l = 0; l < 2; ++l) CHECK(rep.max_phase_after[l] <= ub.phase_bounds[l]);
  }
}

TEST_CASE("a trajectory already at rest settles immediately") {
  const auto net = test::example_network({0, 0, 0});
  const auto dec = decompose(net);
  const auto cert = contractivity_check(GVector(test::kG), dec);
  const auto ub = ultimate_bound(cert, default_zeta0(cert), dec);
  const auto rep = validate_certificate(simulate({5.0, 1e-2, {}, 1}, net, dec), ub);
  CHECK(rep.validated);
  CHECK(rep.settling_time == 0.0);
}
