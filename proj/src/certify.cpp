#include "mgc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "mgc/errors.hpp"

namespace mgc {

namespace {

constexpr double kStrictSlack = 1e-12;
constexpr double kMinGamma = 1e-15;
constexpr int kMaxIterations = 10000;

}  // namespace

GVector::GVector(Vector g) : g_(std::move(g)) {
  if (g_.empty()) throw ValidationError("g vector must not be empty");
  for (double v : g_)
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("g entries must be finite and positive");
}

Vector GVector::full() const {
  Vector out{1.0, 1.0};
  for (double v : g_) {
    out.push_back(v);
    out.push_back(v);
  }
  return out;
}

Vector GVector::tail() const {
  Vector out;
  for (double v : g_) {
    out.push_back(v);
    out.push_back(v);
  }
  return out;
}

namespace {

// (|BᵀV_θ|·z_full)³/6 where z_full already has its leading pair.
Vector cubed_edge_load(const Matrix& edge_map, std::span<const double> z_full) {
  Vector out(edge_map.rows(), 0.0);
  for (std::size_t r = 0; r < edge_map.rows(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < edge_map.cols(); ++c) s += std::abs(edge_map(r, c)) * z_full[c];
    out[r] = s * s * s / 6.0;
  }
  return out;
}

void check_length(std::span<const double> z_hat, const ModalDecomposition& dec, const char* who) {
  if (z_hat.size() != 2 * dec.n() - 2)
    throw std::invalid_argument(std::string(who) + ": z_hat must have length 2n-2");
}

}  // namespace

Vector cni_bound_F(std::span<const double> z_hat, const ModalDecomposition& dec) {
  check_length(z_hat, dec, "cni_bound_F");
  Vector padded(2, 0.0);
  for (double v : z_hat) padded.push_back(std::abs(v));
  return cubed_edge_load(dec.edge_map, padded);
}

Vector t_map(std::span<const double> z_hat, const ModalDecomposition& dec) {
  const Vector f = cni_bound_F(z_hat, dec);
  const auto& tr = dec.transform;
  Vector out(2 * dec.n() - 2);
  for (std::size_t i = 1; i < dec.n(); ++i) {
    double t = std::abs(tr.u_p[i]);
    for (std::size_t j = 0; j < dec.m(); ++j) t += std::abs(tr.u_h(i, j)) * f[j];
    out[2 * i - 2] = t;
    out[2 * i - 1] = t;
  }
  return out;
}

Vector gamma_coeffs(const GVector& g, const ModalDecomposition& dec) {
  if (g.size() != dec.n() - 1) throw ValidationError("g must have n-1 entries");
  const Vector load = cubed_edge_load(dec.edge_map, g.full());
  Vector gamma(dec.n() - 1);
  for (std::size_t i = 1; i < dec.n(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < dec.m(); ++j) s += std::abs(dec.transform.u_h(i, j)) * load[j];
    if (!(s > kMinGamma))
      throw NumericError("gamma_coeffs: gamma_" + std::to_string(i) + " vanishes (u_h row is zero)");
    gamma[i - 1] = s;
  }
  return gamma;
}

ContractivityCertificate contractivity_check(const GVector& g, const ModalDecomposition& dec) {
  ContractivityCertificate cert{g, gamma_coeffs(g, dec), {}, {}, {}, {}, std::nullopt, false, {}};
  const std::size_t modes = dec.n() - 1;
  std::ostringstream diag;
  bool all_modes = true;

  for (std::size_t i = 0; i < modes; ++i) {
    const double up = dec.transform.u_p[i + 1];
    const double gi = g[i];
    const double gam = cert.gamma[i];
    cert.b.push_back(4.0 * gi * gi * gi / (27.0 * gam));
    cert.up_sq.push_back(up * up);
    cert.roots.push_back(cubic_real_roots(gam, 0.0, -gi, std::abs(up)));

    const bool mode_ok = cert.up_sq[i] < cert.b[i] * (1.0 - kStrictSlack);
    std::optional<ZetaInterval> interval;
    if (mode_ok) {
      const auto& r = cert.roots[i].roots;
      if (r.size() == 3 && r[0] < 0.0 && r[1] >= 0.0 && r[2] > r[1]) {
        interval = ZetaInterval{up == 0.0 ? 0.0 : r[1], r[2]};
      } else {
        diag << "mode " << i + 1 << ": condition holds but Q has no two nonnegative roots; ";
      }
    } else {
      diag << "mode " << i + 1 << ": u_p^2 = " << cert.up_sq[i] << " >= b = " << cert.b[i] << "; ";
    }
    all_modes = all_modes && interval.has_value();
    cert.mode_intervals.push_back(interval);
  }

  if (all_modes) {
    ZetaInterval z{0.0, std::numeric_limits<double>::infinity()};
    for (const auto& iv : cert.mode_intervals) {
      z.lo = std::max(z.lo, iv->lo);
      z.hi = std::min(z.hi, iv->hi);
    }
    if (z.lo < z.hi) {
      cert.zeta_interval = z;
      cert.satisfied = true;
    } else {
      diag << "per-mode zeta intervals do not intersect; ";
    }
  }
  cert.diagnostic = diag.str();
  return cert;
}

namespace {

struct Score {
  double primary;
  double secondary;
};

bool better(const Score& a, const Score& b) {
  const double tie = 1e-12 * std::max({1e-300, std::abs(a.primary), std::abs(b.primary)});
  if (std::abs(a.primary - b.primary) > tie) return a.primary > b.primary;
  return a.secondary > b.secondary;
}

Score score_of(const GVector& g, const ModalDecomposition& dec, Objective objective) {
  const Vector gamma = gamma_coeffs(g, dec);
  double min_b = std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double b = 4.0 * g[i] * g[i] * g[i] / (27.0 * gamma[i]);
    const double up = dec.transform.u_p[i + 1];
    min_b = std::min(min_b, b);
    min_margin = std::min(min_margin, b - up * up);
  }
  if (objective == Objective::MinB) return {min_b, min_margin};
  return {min_margin, min_b};
}

GVector from_log(std::span<const double> x) {
  Vector g(x.size());
  std::transform(x.begin(), x.end(), g.begin(), [](double v) { return std::exp(v); });
  return GVector(std::move(g));
}

struct StartResult {
  Vector x;
  Score best;
  Score start;
  int evaluations = 0;
};

// Nelder–Mead maximizing `score` over log g.
StartResult nelder_mead(const ModalDecomposition& dec, Objective objective, Vector x0, int budget) {
  const std::size_t dim = x0.size();
  int evals = 0;
  auto eval = [&](const Vector& x) {
    ++evals;
    return score_of(from_log(x), dec, objective);
  };

  std::vector<Vector> simplex{x0};
  for (std::size_t i = 0; i < dim; ++i) {
    Vector x = x0;
    x[i] += 0.5;
    simplex.push_back(std::move(x));
  }
  std::vector<Score> f;
  for (const auto& x : simplex) f.push_back(eval(x));
  const Score start = f[0];

  std::vector<std::size_t> order(dim + 1);
  while (evals < budget) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return better(f[a], f[b]); });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[dim - 1];

    double size = 0.0;
    for (const auto& x : simplex)
      for (std::size_t i = 0; i < dim; ++i) size = std::max(size, std::abs(x[i] - simplex[best][i]));
    const double spread = std::abs(f[best].primary - f[worst].primary);
    if (size < 1e-10 || (spread <= 1e-15 * std::abs(f[best].primary) && size < 1e-6)) break;

    Vector centroid(dim, 0.0);
    for (std::size_t k = 0; k <= dim; ++k)
      if (k != worst)
        for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[k][i] / double(dim);
    auto along = [&](double t) {
      Vector x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = centroid[i] + t * (simplex[worst][i] - centroid[i]);
      return x;
    };

    Vector xr = along(-1.0);
    Score fr = eval(xr);
    if (better(fr, f[best])) {
      Vector xe = along(-2.0);
      Score fe = eval(xe);
      if (better(fe, fr)) {
        simplex[worst] = std::move(xe);
        f[worst] = fe;
      } else {
        simplex[worst] = std::move(xr);
        f[worst] = fr;
      }
      continue;
    }
    if (better(fr, f[second_worst])) {
      simplex[worst] = std::move(xr);
      f[worst] = fr;
      continue;
    }
    const bool outside = better(fr, f[worst]);
    Vector xc = along(outside ? -0.5 : 0.5);
    Score fc = eval(xc);
    if (better(fc, outside ? fr : f[worst])) {
      simplex[worst] = std::move(xc);
      f[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= dim; ++k) {
      if (k == best) continue;
      for (std::size_t i = 0; i < dim; ++i)
        simplex[k][i] = simplex[best][i] + 0.5 * (simplex[k][i] - simplex[best][i]);
      f[k] = eval(simplex[k]);
    }
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k <= dim; ++k)
    if (better(f[k], f[best])) best = k;
  return {simplex[best], f[best], start, evals};
}

}  // namespace

double g_objective(const GVector& g, const ModalDecomposition& dec, Objective objective) {
  return score_of(g, dec, objective).primary;
}

OptimizeResult optimize_g(const ModalDecomposition& dec, const OptimizeOptions& options) {
  const std::size_t dim = dec.n() - 1;
  std::vector<Vector> starts{Vector(dim, 0.0)};
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int s = 0; s < options.random_starts; ++s) {
    Vector x(dim);
    for (auto& v : x) v = unif(rng);
    starts.push_back(std::move(x));
  }

  std::vector<std::future<StartResult>> jobs;
  for (const auto& x0 : starts)
    jobs.push_back(std::async(std::launch::async, nelder_mead, std::cref(dec), options.objective, x0,
                              options.max_evaluations));

  std::optional<StartResult> best;
  std::optional<Score> best_start;
  int evaluations = 0;
  for (auto& job : jobs) {
    StartResult r = job.get();
    evaluations += r.evaluations;
    if (!best_start || better(r.start, *best_start)) best_start = r.start;
    if (!best || better(r.best, best->best)) best = std::move(r);
  }

  const GVector g = from_log(best->x);
  const Score s = score_of(g, dec, Objective::MinB);
  OptimizeResult out{g, best->best.primary, s.primary, s.secondary, best_start->primary, false,
                     evaluations};
  out.improved = better(best->best, *best_start);
  return out;
}

double default_zeta0(const ContractivityCertificate& cert) {
  if (!cert.zeta_interval) throw CertificateError("no certified zeta interval");
  const auto& z = *cert.zeta_interval;
  if (z.lo <= 0.0) return 0.5 * z.hi;
  return std::sqrt(z.lo * z.hi);
}

UltimateBound ultimate_bound(const ContractivityCertificate& cert, double zeta0,
                             const ModalDecomposition& dec) {
  if (!cert.satisfied || !cert.zeta_interval)
    throw CertificateError("contractivity condition is not satisfied: " + cert.diagnostic);
  if (!cert.zeta_interval->contains(zeta0)) {
    std::ostringstream msg;
    msg << "zeta0 = " << zeta0 << " lies outside the certified interval (" << cert.zeta_interval->lo
        << ", " << cert.zeta_interval->hi << ")";
    throw CertificateError(msg.str());
  }

  UltimateBound ub;
  ub.zeta0 = zeta0;
  ub.z_bar0 = cert.g.tail();
  for (auto& v : ub.z_bar0) v *= zeta0;

  Vector current = t_map(ub.z_bar0, dec);
  for (std::size_t i = 0; i < current.size(); ++i)
    if (!(current[i] < ub.z_bar0[i]))
      throw CertificateError("T(z_bar0) < z_bar0 fails in component " + std::to_string(i + 1));
  ub.iterations = 1;

  while (true) {
    if (ub.iterations >= kMaxIterations)
      throw NumericError("ultimate_bound: iteration cap reached");
    Vector next = t_map(current, dec);
    ++ub.iterations;
    const double norm = norm_inf(current);
    double step = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      if (next[i] > current[i] + 1e-14 * (1.0 + norm))
        throw NumericError("ultimate_bound: iterate increased in component " + std::to_string(i + 1));
      step = std::max(step, std::abs(next[i] - current[i]));
    }
    current = std::move(next);
    if (step <= 1e-10 * (1.0 + norm)) break;
  }
  ub.b_z = std::move(current);
  ub.phase_bounds = phase_bounds(ub.b_z, dec);
  return ub;
}

Vector phase_bounds(std::span<const double> b_z, const ModalDecomposition& dec) {
  if (b_z.size() != 2 * dec.n() - 2) throw std::invalid_argument("phase_bounds: b_z has wrong length");
  Vector out(dec.m(), 0.0);
  for (std::size_t r = 0; r < dec.m(); ++r)
    for (std::size_t c = 2; c < dec.edge_map.cols(); ++c)
      out[r] += std::abs(dec.edge_map(r, c)) * b_z[c - 2];
  return out;
}

}  // namespace mgc
