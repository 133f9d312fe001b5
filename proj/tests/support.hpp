#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mgc/errors.hpp"
#include "mgc/grid_model.hpp"
#include "mgc/matrix.hpp"
#include "mgc/modal.hpp"

namespace mgc::test {

// Reference values for the 3-bus example (a12 = 2, a13 = 5, d = k = eps = 1).
inline const Vector kMu{0.0, 2.6411, 11.3589};
inline const Matrix kU{{1, 0.4718, -1.2718}, {1, -1.4718, 0.2718}, {1, 1, 1}};
inline const Vector kLambda{0, -2, -0.6641, -3.9770, -0.9126, -12.4463};
inline const Matrix kV{{1, 0.5, 0.2386, -0.3532, -0.1217, 1.1696},
                       {1, 0.5, -0.7444, 1.1017, 0.0260, -0.2499},
                       {1, 0.5, 0.5058, -0.7486, 0.0957, -0.9197},
                       {0, 1, -0.4718, -0.4718, 1.2718, 1.2718},
                       {0, 1, 1.4718, 1.4718, -0.2718, -0.2718},
                       {0, 1, -1, -1, -1, -1}};
inline const Vector kGamma{1, 2, -0.6641, 3.9770, -0.9126, 12.4463};
inline const Vector kR{2, 3.3129, 11.5336};
inline const Matrix kUh{{0, 0}, {0.3462, -0.2353}, {-0.0995, -0.3659}};
inline const Matrix kEdgeMap{{0, 0, 0.9831, -1.4549, -0.1478, 1.4195},
                             {0, 0, -0.2672, 0.3954, -0.2175, 2.0893}};
inline const Vector kG{8.0377, 6.4202};

inline MicrogridNetwork example_network(Vector p_star = {1, 2, 3}, double epsilon = 1.0) {
  return MicrogridNetwork({{"1", p_star[0]}, {"2", p_star[1]}, {"3", p_star[2]}},
                          {{"1", "2", 2.0}, {"1", "3", 5.0}, {"2", "3", 0.0}},
                          {1.0, 1.0, epsilon});
}

inline double max_diff(const Matrix& a, const Matrix& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r = std::max(r, std::abs(a(i, j) - b(i, j)));
  return r;
}

inline double max_diff(std::span<const double> a, std::span<const double> b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

struct RandomNet {
  MicrogridNetwork net;
  ModalDecomposition dec;
};

/// Connected network on 2..max_n buses: a random spanning tree plus extra
/// lines, random weights, setpoints and gains. Draws again whenever the
/// Laplacian has a repeated nonzero eigenvalue.
inline RandomNet random_network(std::mt19937_64& rng, std::size_t max_n = 8, double p_scale = 1.0) {
  std::uniform_real_distribution<double> weight(0.5, 5.0), gain(0.5, 2.0), unit(0.0, 1.0);
  for (;;) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_n)(rng);
    std::vector<Bus> buses;
    for (std::size_t i = 0; i < n; ++i)
      buses.push_back({"b" + std::to_string(i), p_scale * (2.0 * unit(rng) - 1.0)});
    std::vector<Line> lines;
    std::vector<std::vector<bool>> used(n, std::vector<bool>(n, false));
    auto add = [&](std::size_t a, std::size_t b) {
      if (a == b || used[a][b]) return;
      used[a][b] = used[b][a] = true;
      if (unit(rng) < 0.5) std::swap(a, b);
      lines.push_back({buses[a].id, buses[b].id, weight(rng)});
    };
    for (std::size_t i = 1; i < n; ++i) add(i, std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (unit(rng) < 0.3) add(i, j);
    try {
      MicrogridNetwork net(std::move(buses), std::move(lines), {gain(rng), gain(rng), gain(rng)});
      auto dec = decompose(net);
      return {std::move(net), std::move(dec)};
    } catch (const UnsupportedNetwork&) {
    }
  }
}

}  // namespace mgc::test
