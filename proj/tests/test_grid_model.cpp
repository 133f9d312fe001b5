#include <doctest.h>

#include "mgc/errors.hpp"
#include "mgc/grid_model.hpp"
#include "support.hpp"

using namespace mgc;
using mgc::test::example_network;

TEST_CASE("example network prunes the zero-weight line") {
  const auto net = example_network();
  CHECK(net.n() == 3);
  CHECK(net.m() == 2);
  CHECK(net.lines()[0].to == "2");
  CHECK(net.lines()[1].to == "3");
  CHECK(net.p_star_sum() == 6.0);
}

TEST_CASE("minimal and degenerate networks") {
  const MicrogridNetwork two({{"1", 0}, {"2", 0}}, {{"1", "2", 1.0}}, {});
  CHECK(two.n() == 2);
  CHECK(two.m() == 1);
  CHECK(incidence_matrix(two) == Matrix{{1}, {-1}});
  CHECK(weight_matrix(two) == Matrix{{1}});
  CHECK(laplacian(two) == Matrix{{1, -1}, {-1, 1}});

  CHECK_THROWS_AS(MicrogridNetwork({{"1", 0}, {"2", 0}, {"3", 0}}, {{"1", "2", 1.0}}, {}), ValidationError);
  try {
    MicrogridNetwork({{"1", 0}, {"2", 0}, {"3", 0}}, {{"1", "2", 1.0}}, {});
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("{3}") != std::string::npos);
  }
}

TEST_CASE("input validation") {
  const std::vector<Bus> b3{{"1", 0}, {"2", 0}, {"3", 0}};
  CHECK_THROWS_AS(MicrogridNetwork({{"1", 0}}, {}, {}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork({{"1", 0}, {"1", 0}}, {{"1", "1", 1}}, {}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork(b3, {{"1", "1", 1}, {"1", "2", 1}, {"2", "3", 1}}, {}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork(b3, {{"1", "2", -1}, {"2", "3", 1}}, {}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork(b3, {{"1", "9", 1}, {"2", "3", 1}}, {}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork(b3, {{"1", "2", 1}, {"2", "1", 1}, {"2", "3", 1}}, {}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork(b3, {{"1", "2", 1}, {"2", "3", 1}}, {0.0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork(b3, {{"1", "2", 1}, {"2", "3", 1}}, {1.0, 1.0, -1.0}), ValidationError);
  CHECK_THROWS_AS(MicrogridNetwork({{"1", NAN}, {"2", 0}}, {{"1", "2", 1}}, {}), ValidationError);
}

TEST_CASE("example matrices") {
  const auto net = example_network();
  CHECK(incidence_matrix(net) == Matrix{{1, 1}, {-1, 0}, {0, -1}});
  CHECK(weight_matrix(net) == Matrix{{2, 0}, {0, 5}});
  CHECK(laplacian(net) == Matrix{{7, -2, -5}, {-2, 2, 0}, {-5, 0, 5}});
}

TEST_CASE("weights scale linearly into Y") {
  const double c = 3.5;
  const auto a = example_network();
  const MicrogridNetwork b({{"1", 1}, {"2", 2}, {"3", 3}}, {{"1", "2", 2.0 * c}, {"1", "3", 5.0 * c}}, {});
  CHECK(test::max_diff(weight_matrix(b), c * weight_matrix(a)) == 0.0);
}

TEST_CASE("laplacian equals the per-edge sum on random networks") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = test::random_network(rng, 8);
    const auto& net = r.net;
    const Matrix L = laplacian(net);
    Matrix oracle(net.n(), net.n());
    for (std::size_t l = 0; l < net.m(); ++l) {
      const auto i = net.from_index(l), j = net.to_index(l);
      const double a = net.lines()[l].weight;
      oracle(i, i) += a;
      oracle(j, j) += a;
      oracle(i, j) -= a;
      oracle(j, i) -= a;
    }
    CHECK(test::max_diff(L, oracle) <= 1e-12);
    CHECK(L == L.transpose());
    const Vector ones(net.n(), 1.0);
    CHECK(norm_inf(L * ones) <= 1e-12);
    const Matrix B = incidence_matrix(net);
    for (std::size_t j = 0; j < net.m(); ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < net.n(); ++i) s += B(i, j);
      CHECK(s == 0.0);
    }
  }
}

TEST_CASE("config parsing") {
  const char* good = R"({"params":{"d":1,"k":1,"epsilon":1},
    "buses":[{"id":1,"p_star":1},{"id":2,"p_star":2},{"id":3,"p_star":3,"d":1}],
    "lines":[{"from":1,"to":2,"a":2},{"from":1,"to":3,"a":5},{"from":2,"to":3,"a":0}]})";
  CHECK(load_network(good) == example_network());

  CHECK_THROWS_AS(load_network("{not json"), ConfigError);
  CHECK_THROWS_AS(load_network(R"({"buses":[],"lines":[]})"), ConfigError);
  const char* hetero = R"({"params":{"d":1,"k":1,"epsilon":1},
    "buses":[{"id":"a","p_star":0,"d":2},{"id":"b","p_star":0}],
    "lines":[{"from":"a","to":"b","a":1}]})";
  CHECK_THROWS_AS(load_network(hetero), ValidationError);
  CHECK(load_network_file(MGC_DATA_DIR "/example3.json") == example_network());
  CHECK_THROWS_AS(load_network_file(MGC_DATA_DIR "/disconnected.json"), ValidationError);
}
