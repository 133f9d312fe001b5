#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mgc/matrix.hpp"

namespace mgc {

struct Bus {
  std::string id;
  double p_star = 0.0;  ///< P_ref − P_load, per unit
};

struct Line {
  std::string from;  ///< source bus (+1 in B)
  std::string to;    ///< sink bus (−1 in B)
  double weight = 0.0;  ///< a_ij = y_ij·E_i·E_j, per unit
};

/// Uniform droop (d), secondary (k) and leak (epsilon) gains.
struct ControlParams {
  double d = 1.0;
  double k = 1.0;
  double epsilon = 1.0;

  double e() const noexcept { return 1.0 + epsilon * d; }
};

/// Lines with weight below this are treated as absent.
inline constexpr double kPruneWeight = 1e-12;

/// Immutable, validated microgrid: buses and lines in file order, zero-weight
/// lines pruned, connected.
class MicrogridNetwork {
 public:
  /// Validates and prunes. Throws ValidationError on duplicate ids, unknown
  /// endpoints, self-loops, negative or non-finite weights, duplicate
  /// unordered pairs, nonpositive gains, n < 2 or a disconnected graph.
  MicrogridNetwork(std::vector<Bus> buses, std::vector<Line> lines, ControlParams params);

  std::size_t n() const noexcept { return buses_.size(); }
  std::size_t m() const noexcept { return lines_.size(); }
  const std::vector<Bus>& buses() const noexcept { return buses_; }
  const std::vector<Line>& lines() const noexcept { return lines_; }
  const ControlParams& params() const noexcept { return params_; }

  std::size_t from_index(std::size_t line) const { return endpoints_[line].first; }
  std::size_t to_index(std::size_t line) const { return endpoints_[line].second; }
  std::size_t index_of(std::string_view id) const;

  Vector p_star() const;
  double p_star_sum() const;

  friend bool operator==(const MicrogridNetwork&, const MicrogridNetwork&);

 private:
  std::vector<Bus> buses_;
  std::vector<Line> lines_;
  ControlParams params_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
};

/// Parse the JSON config: {"params":{d,k,epsilon}, "buses":[{id,p_star}],
/// "lines":[{from,to,a}]}. Per-bus "d"/"k" are accepted only when they equal
/// the uniform gains. Throws ConfigError on malformed text.
MicrogridNetwork load_network(std::string_view config_text);
MicrogridNetwork load_network_file(const std::filesystem::path& path);

/// Node-by-line ±1 matrix: +1 at the source, −1 at the sink.
Matrix incidence_matrix(const MicrogridNetwork& net);
/// diag(a) in line order.
Matrix weight_matrix(const MicrogridNetwork& net);
/// B·Y·Bᵀ.
Matrix laplacian(const MicrogridNetwork& net);

}  // namespace mgc
