#include "mgc/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "mgc/errors.hpp"

namespace mgc {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kMaxCondition = 1e12;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenPairs sym_eig(const Matrix& s) {
  if (!s.square()) throw NumericError("sym_eig: matrix is not square");
  const std::size_t n = s.rows();
  const double scale = std::max(1.0, max_abs(s));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * scale)
        throw NumericError("sym_eig: matrix is not symmetric");

  Matrix a = s;
  Matrix v = Matrix::identity(n);
  // Frobenius norm is invariant under the rotations; stop once the
  // off-diagonal mass is at roundoff level.
  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= 1e-15 * std::max(frob, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps) throw NumericError("sym_eig: Jacobi sweeps did not converge");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenPairs out{Vector(n), Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]);
    out.vectors.set_col(j, v.col(order[j]));
  }
  return out;
}

namespace {

double eval_cubic(double a, double b, double c, double d, double x) {
  return ((a * x + b) * x + c) * x + d;
}

double polish(double a, double b, double c, double d, double x) {
  for (int it = 0; it < 20; ++it) {
    const double f = eval_cubic(a, b, c, d, x);
    const double df = (3.0 * a * x + 2.0 * b) * x + c;
    if (f == 0.0 || df == 0.0) break;
    const double next = x - f / df;
    if (std::abs(eval_cubic(a, b, c, d, next)) >= std::abs(f)) break;
    x = next;
  }
  return x;
}

}  // namespace

CubicRoots cubic_real_roots(double a, double b, double c, double d) {
  if (a == 0.0) throw std::invalid_argument("cubic_real_roots: leading coefficient is zero");

  CubicRoots out;
  out.discriminant = 18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c -
                     4.0 * a * c * c * c - 27.0 * a * a * d * d;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});

  // Depressed cubic t³ + p t + q with x = t − b/(3a).
  const double bn = b / a;
  const double cn = c / a;
  const double dn = d / a;
  const double shift = bn / 3.0;
  const double p = cn - bn * bn / 3.0;
  const double q = 2.0 * bn * bn * bn / 27.0 - bn * cn / 3.0 + dn;

  Vector raw;
  if (out.discriminant > 0.0 && p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      raw.push_back(m * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
  } else {
    // One real root from Cardano, the rest from the deflated quadratic.
    const double half_q = q / 2.0;
    const double inner = half_q * half_q + p * p * p / 27.0;
    double t;
    if (inner >= 0.0) {
      const double sq = std::sqrt(inner);
      t = std::cbrt(-half_q + sq) + std::cbrt(-half_q - sq);
    } else {
      const double m = 2.0 * std::sqrt(-p / 3.0);
      t = m * std::cos(std::acos(std::clamp(3.0 * q / (p * m), -1.0, 1.0)) / 3.0);
    }
    const double x0 = polish(a, b, c, d, t - shift);
    raw.push_back(x0);
    // a x² + (b + a x0) x + (c + (b + a x0) x0)
    const double qb = b + a * x0;
    const double qc = c + qb * x0;
    const double disc = qb * qb - 4.0 * a * qc;
    const double tiny = 1e-12 * std::max(qb * qb, std::abs(4.0 * a * qc));
    if (disc >= -tiny) {
      const double sq = std::sqrt(std::max(disc, 0.0));
      const double r = -0.5 * (qb + std::copysign(sq, qb));
      if (r != 0.0) {
        raw.push_back(r / a);
        raw.push_back(qc / r);
      } else {
        raw.push_back(0.0);
        raw.push_back(0.0);
      }
    }
  }

  for (auto& r : raw) r = polish(a, b, c, d, r);
  std::sort(raw.begin(), raw.end());
  const double merge_tol = 1e-9 * scale;
  for (double r : raw) {
    if (!out.roots.empty() && std::abs(r - out.roots.back()) <= merge_tol) continue;
    out.roots.push_back(r);
  }
  return out;
}

Matrix invert(const Matrix& m) {
  if (!m.square()) throw NumericError("invert: matrix is not square");
  const std::size_t n = m.rows();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  const double scale = std::max(max_abs(m), 1e-300);

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= 1e-14 * scale)
      throw NumericError("invert: matrix is singular to working precision");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const double piv = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= piv;
      inv(col, j) /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }

  if (norm_inf(m) * norm_inf(inv) > kMaxCondition)
    throw NumericError("invert: matrix is ill-conditioned (condition estimate > 1e12)");
  return inv;
}

}  // namespace mgc
