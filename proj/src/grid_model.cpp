#include "mgc/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mgc/errors.hpp"
#include "mgc/spectral.hpp"

namespace mgc {

namespace {

// Components by union-find; used only to name isolated buses in the
// error message, the connectivity decision itself is spectral.
std::vector<std::vector<std::size_t>> components(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto [a, b] : edges) parent[find(a)] = find(b);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::ptrdiff_t> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::ptrdiff_t>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

}  // namespace

MicrogridNetwork::MicrogridNetwork(std::vector<Bus> buses, std::vector<Line> lines,
                                   ControlParams params)
    : buses_(std::move(buses)), params_(params) {
  if (!(params_.d > 0.0) || !(params_.k > 0.0) || !(params_.epsilon > 0.0) ||
      !std::isfinite(params_.d) || !std::isfinite(params_.k) || !std::isfinite(params_.epsilon))
    throw ValidationError("gains d, k and epsilon must be finite and strictly positive");
  if (buses_.size() < 2) throw ValidationError("network needs at least 2 buses");

  std::set<std::string> seen;
  for (const auto& b : buses_) {
    if (!seen.insert(b.id).second) throw ValidationError("duplicate bus id '" + b.id + "'");
    if (!std::isfinite(b.p_star)) throw ValidationError("bus '" + b.id + "': p_star not finite");
  }

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (auto& line : lines) {
    if (line.from == line.to) throw ValidationError("self-loop at bus '" + line.from + "'");
    if (!std::isfinite(line.weight) || line.weight < 0.0)
      throw ValidationError("line " + line.from + "-" + line.to +
                            ": weight must be finite and nonnegative");
    const std::size_t i = index_of(line.from);
    const std::size_t j = index_of(line.to);
    if (line.weight < kPruneWeight) continue;
    if (!pairs.insert({std::min(i, j), std::max(i, j)}).second)
      throw ValidationError("more than one line between '" + line.from + "' and '" + line.to + "'");
    lines_.push_back(std::move(line));
    endpoints_.emplace_back(i, j);
  }
  if (lines_.empty()) throw ValidationError("network has no lines with nonzero weight");

  const Matrix lap = laplacian(*this);
  const auto eig = sym_eig(lap);
  const double mu2 = eig.values[1];
  if (!(mu2 > 1e-9 * std::max(1.0, trace(lap)))) {
    const auto groups = components(n(), endpoints_);
    std::ostringstream msg;
    msg << "network is disconnected (algebraic connectivity " << mu2 << ");";
    for (std::size_t g = 1; g < groups.size(); ++g) {
      msg << " isolated component {";
      for (std::size_t k = 0; k < groups[g].size(); ++k)
        msg << (k ? ", " : "") << buses_[groups[g][k]].id;
      msg << "}";
    }
    throw ValidationError(msg.str());
  }
}

std::size_t MicrogridNetwork::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < buses_.size(); ++i)
    if (buses_[i].id == id) return i;
  throw ValidationError("unknown bus id '" + std::string(id) + "'");
}

Vector MicrogridNetwork::p_star() const {
  Vector p(n());
  std::transform(buses_.begin(), buses_.end(), p.begin(), [](const Bus& b) { return b.p_star; });
  return p;
}

double MicrogridNetwork::p_star_sum() const {
  double s = 0.0;
  for (const auto& b : buses_) s += b.p_star;
  return s;
}

bool operator==(const MicrogridNetwork& a, const MicrogridNetwork& b) {
  if (a.n() != b.n() || a.m() != b.m()) return false;
  if (a.params_.d != b.params_.d || a.params_.k != b.params_.k ||
      a.params_.epsilon != b.params_.epsilon)
    return false;
  for (std::size_t i = 0; i < a.n(); ++i)
    if (a.buses_[i].id != b.buses_[i].id || a.buses_[i].p_star != b.buses_[i].p_star) return false;
  for (std::size_t j = 0; j < a.m(); ++j)
    if (a.lines_[j].from != b.lines_[j].from || a.lines_[j].to != b.lines_[j].to ||
        a.lines_[j].weight != b.lines_[j].weight)
      return false;
  return true;
}

namespace {

using nlohmann::json;

std::string id_string(const json& v, const char* what) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ConfigError(std::string(what) + " must be a string or integer");
}

double number(const json& obj, const char* key, const char* ctx) {
  if (!obj.contains(key)) throw ConfigError(std::string(ctx) + ": missing '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string(ctx) + ": '" + key + "' must be a number");
  return v.get<double>();
}

bool same_gain(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

MicrogridNetwork load_network(std::string_view config_text) {
  json doc;
  try {
    doc = json::parse(config_text.begin(), config_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const char* key : {"params", "buses", "lines"})
    if (!doc.contains(key)) throw ConfigError(std::string("config: missing '") + key + "'");

  const auto& jp = doc.at("params");
  if (!jp.is_object()) throw ConfigError("config: 'params' must be an object");
  ControlParams params{number(jp, "d", "params"), number(jp, "k", "params"),
                       number(jp, "epsilon", "params")};

  const auto& jb = doc.at("buses");
  if (!jb.is_array()) throw ConfigError("config: 'buses' must be an array");
  std::vector<Bus> buses;
  for (const auto& b : jb) {
    if (!b.is_object() || !b.contains("id")) throw ConfigError("bus entries need an 'id'");
    Bus bus{id_string(b.at("id"), "bus id"), number(b, "p_star", "bus")};
    // Per-bus gains are tolerated only when they repeat the uniform values.
    if (b.contains("d") && !same_gain(number(b, "d", "bus"), params.d))
      throw ValidationError("bus '" + bus.id + "': heterogeneous droop gains are not supported");
    if (b.contains("k") && !same_gain(number(b, "k", "bus"), params.k))
      throw ValidationError("bus '" + bus.id +
                            "': heterogeneous secondary gains are not supported");
    buses.push_back(std::move(bus));
  }

  const auto& jl = doc.at("lines");
  if (!jl.is_array()) throw ConfigError("config: 'lines' must be an array");
  std::vector<Line> lines;
  for (const auto& l : jl) {
    if (!l.is_object() || !l.contains("from") || !l.contains("to"))
      throw ConfigError("line entries need 'from' and 'to'");
    lines.push_back(
        {id_string(l.at("from"), "line from"), id_string(l.at("to"), "line to"), number(l, "a", "line")});
  }

  return MicrogridNetwork(std::move(buses), std::move(lines), params);
}

MicrogridNetwork load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_network(ss.str());
}

Matrix incidence_matrix(const MicrogridNetwork& net) {
  Matrix b(net.n(), net.m());
  for (std::size_t j = 0; j < net.m(); ++j) {
    b(net.from_index(j), j) = 1.0;
    b(net.to_index(j), j) = -1.0;
  }
  return b;
}

Matrix weight_matrix(const MicrogridNetwork& net) {
  Matrix y(net.m(), net.m());
  for (std::size_t j = 0; j < net.m(); ++j) y(j, j) = net.lines()[j].weight;
  return y;
}

Matrix laplacian(const MicrogridNetwork& net) {
  const Matrix b = incidence_matrix(net);
  return b * weight_matrix(net) * b.transpose();
}

}  // namespace mgc
