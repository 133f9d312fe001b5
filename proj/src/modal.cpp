#include "mgc/modal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mgc/errors.hpp"
#include "mgc/spectral.hpp"

namespace mgc {

namespace {

constexpr double kLaplacianIdentityTol = 1e-9;
constexpr double kTransformTol = 1e-8;

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

LaplacianSpectrum laplacian_spectrum(const Matrix& laplacian) {
  const std::size_t n = laplacian.rows();
  auto eig = sym_eig(laplacian);
  const double mu_max = eig.values.back();

  if (std::abs(eig.values[0]) > 1e-9 * std::max(1.0, mu_max))
    throw NumericError("laplacian_spectrum: smallest eigenvalue " + fmt(eig.values[0]) +
                       " is not zero");
  if (!(eig.values[1] > 1e-9 * std::max(1.0, trace(laplacian))))
    throw ValidationError("laplacian_spectrum: graph is disconnected (mu_2 = " +
                          fmt(eig.values[1]) + ")");
  for (std::size_t j = 2; j < n; ++j)
    if (eig.values[j] - eig.values[j - 1] <= 1e-8 * mu_max)
      throw UnsupportedNetwork("repeated nonzero Laplacian eigenvalue " + fmt(eig.values[j]) +
                               "; the modal certificate needs distinct eigenvalues");

  LaplacianSpectrum out;
  out.mu = eig.values;
  out.mu[0] = 0.0;
  out.U = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) out.U(i, 0) = 1.0;
  for (std::size_t j = 1; j < n; ++j) {
    Vector u = eig.vectors.col(j);
    std::size_t pivot = n;
    for (std::size_t i = n; i-- > 0;)
      if (std::abs(u[i]) > 1e-10) {
        pivot = i;
        break;
      }
    if (pivot == n) throw NumericError("laplacian_spectrum: zero eigenvector");
    const double s = u[pivot];
    for (auto& x : u) x /= s;
    out.U.set_col(j, u);
  }
  out.U_inv = invert(out.U);

  for (std::size_t j = 0; j < n; ++j) {
    const double want = 1.0 / static_cast<double>(n);
    if (std::abs(out.U_inv(0, j) - want) > kLaplacianIdentityTol)
      throw NumericError("laplacian_spectrum: first row of U^-1 is not 1/n");
  }
  for (std::size_t j = 1; j < n; ++j) {
    double col = 0.0;
    double row = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      col += out.U(i, j);
      row += out.U_inv(j, i);
    }
    if (std::abs(col) > kLaplacianIdentityTol || std::abs(row) > kLaplacianIdentityTol)
      throw NumericError("laplacian_spectrum: nonzero mode is not orthogonal to 1_n");
  }
  return out;
}

ClosedLoopSystem closed_loop_system(const MicrogridNetwork& net) {
  const std::size_t n = net.n();
  const auto& p = net.params();
  const double d = p.d;
  const double dk = p.d * p.k;
  const Matrix lap = laplacian(net);
  const Matrix by = incidence_matrix(net) * weight_matrix(net);
  const Vector ps = net.p_star();

  ClosedLoopSystem sys{Matrix(2 * n, 2 * n), Matrix(2 * n, net.m()), Vector(2 * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sys.A(i, j) = -lap(i, j) / d;
      sys.A(n + i, j) = -lap(i, j) / dk;
    }
    sys.A(i, n + i) = -1.0 / d;
    sys.A(n + i, n + i) = -p.e() / dk;
    for (std::size_t j = 0; j < net.m(); ++j) {
      sys.H(i, j) = -by(i, j) / d;
      sys.H(n + i, j) = -by(i, j) / dk;
    }
    sys.P_bar[i] = ps[i] / d;
    sys.P_bar[n + i] = ps[i] / dk;
  }
  return sys;
}

SystemEigenstructure closed_form_eigs(const LaplacianSpectrum& spectrum, const ControlParams& params) {
  const std::size_t n = spectrum.mu.size();
  const double d = params.d;
  const double k = params.k;
  const double e = params.e();
  const double dk = d * k;

  SystemEigenstructure out{Vector(2 * n), Matrix(2 * n, 2 * n)};
  out.lambda[0] = 0.0;
  out.lambda[1] = -e / dk;
  for (std::size_t r = 0; r < n; ++r) {
    out.V(r, 0) = 1.0;
    out.V(r, 1) = k / e;
    out.V(n + r, 1) = 1.0;
  }

  for (std::size_t i = 1; i < n; ++i) {
    const double mu = spectrum.mu[i];
    if (!(mu > 0.0)) throw NumericError("closed_form_eigs: nonpositive Laplacian eigenvalue");
    const double r = std::sqrt(4.0 * mu * k + (e - mu * k) * (e - mu * k));
    const double fast = -(e + mu * k + r) / (2.0 * dk);
    // Product of the pair is μ(e−1)/(d²k); avoids cancellation in e+μk−R.
    const double slow = mu * (e - 1.0) / (d * dk * fast);
    out.lambda[2 * i] = slow;
    out.lambda[2 * i + 1] = fast;
    for (std::size_t c : {2 * i, 2 * i + 1}) {
      const double coef = (e + dk * out.lambda[c]) / mu;
      for (std::size_t row = 0; row < n; ++row) {
        out.V(row, c) = coef * spectrum.U(row, i);
        out.V(n + row, c) = -spectrum.U(row, i);
      }
    }
  }
  return out;
}

ModalTransform modal_transform(const LaplacianSpectrum& spectrum, const SystemEigenstructure& eig,
                               const MicrogridNetwork& net) {
  const std::size_t n = net.n();
  const auto& p = net.params();
  const double e = p.e();

  ModalTransform t;
  t.R.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mu = spectrum.mu[i];
    t.R[i] = std::sqrt(4.0 * mu * p.k + (e - mu * p.k) * (e - mu * p.k));
  }
  t.gamma.resize(2 * n);
  t.gamma[0] = e - 1.0;
  for (std::size_t j = 1; j < 2 * n; ++j) t.gamma[j] = (j % 2 == 1) ? -eig.lambda[j] : eig.lambda[j];

  const Matrix proj = spectrum.U_inv * incidence_matrix(net) * weight_matrix(net);
  const Vector proj_p = spectrum.U_inv * net.p_star();
  t.u_h = Matrix(n, net.m());
  t.u_p.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < net.m(); ++j) t.u_h(i, j) = proj(i, j) / t.R[i];
    t.u_p[i] = proj_p[i] / t.R[i];
  }

  t.U_H = Matrix(2 * n, net.m());
  t.U_P.resize(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < net.m(); ++j) {
      t.U_H(2 * i, j) = t.u_h(i, j);
      t.U_H(2 * i + 1, j) = t.u_h(i, j);
    }
    t.U_P[2 * i] = t.u_p[i];
    t.U_P[2 * i + 1] = t.u_p[i];
  }
  return t;
}

double decoupling_residual(const Matrix& V_theta, const Matrix& B) {
  const Matrix edge = B.transpose() * V_theta;
  double r = 0.0;
  for (std::size_t i = 0; i < edge.rows(); ++i)
    r = std::max({r, std::abs(edge(i, 0)), std::abs(edge(i, 1))});
  return r;
}

ModalDecomposition decompose(const MicrogridNetwork& net) {
  const std::size_t n = net.n();
  const auto& p = net.params();
  const double e = p.e();

  ModalDecomposition dec;
  dec.params = p;
  dec.B = incidence_matrix(net);
  dec.Y = weight_matrix(net);
  dec.L = dec.B * dec.Y * dec.B.transpose();
  dec.spectrum = laplacian_spectrum(dec.L);
  dec.system = closed_loop_system(net);
  auto eig = closed_form_eigs(dec.spectrum, p);
  dec.lambda = std::move(eig.lambda);
  dec.V = std::move(eig.V);
  dec.V_inv = invert(dec.V);
  dec.V_theta = dec.V.row_block(0, n);
  dec.transform = modal_transform(dec.spectrum, {dec.lambda, dec.V}, net);
  dec.edge_map = dec.B.transpose() * dec.V_theta;

  auto& res = dec.residuals;
  const auto& sp = dec.spectrum;
  for (std::size_t j = 0; j < n; ++j) {
    const Vector u = sp.U.col(j);
    const Vector lu = dec.L * u;
    for (std::size_t i = 0; i < n; ++i)
      res.laplacian_eigen = std::max(res.laplacian_eigen, std::abs(lu[i] - sp.mu[j] * u[i]));
    res.zero_mode_row = std::max(res.zero_mode_row, std::abs(sp.U_inv(0, j) - 1.0 / double(n)));
    if (j == 0) continue;
    double col = 0.0;
    double row = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      col += sp.U(i, j);
      row += sp.U_inv(j, i);
    }
    res.column_sums = std::max(res.column_sums, std::abs(col));
    res.row_sums = std::max(res.row_sums, std::abs(row));
  }

  const Matrix& A = dec.system.A;
  const Matrix av = A * dec.V;
  double worst = 0.0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    double rowsum = 0.0;
    for (std::size_t j = 0; j < 2 * n; ++j) rowsum += std::abs(av(i, j) - dec.V(i, j) * dec.lambda[j]);
    worst = std::max(worst, rowsum);
  }
  res.eigen = worst / norm_inf(A);

  const auto& tr = dec.transform;
  const Matrix vih = dec.V_inv * dec.system.H;
  double scale_h = 1.0;
  for (std::size_t i = 0; i < 2 * n; ++i)
    for (std::size_t j = 0; j < net.m(); ++j) {
      const double want = tr.gamma[i] * tr.U_H(i, j);
      scale_h = std::max(scale_h, std::abs(want));
      res.input_transform = std::max(res.input_transform, std::abs(vih(i, j) - want));
    }

  const Vector vip = dec.V_inv * dec.system.P_bar;
  double scale_p = 1.0;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const double sum = vip[i] + tr.gamma[i] * tr.U_P[i];
    scale_p = std::max(scale_p, std::abs(tr.gamma[i] * tr.U_P[i]));
    if (i < 2)
      res.forcing_first_rows = std::max(res.forcing_first_rows, std::abs(sum));
    else
      res.forcing_transform = std::max(res.forcing_transform, std::abs(sum));
  }
  const double mean_p = net.p_star_sum() / double(n);
  const double z1_force = (e - 1.0) / (p.d * e) * mean_p;
  const double z2_force = mean_p / (p.d * p.k);
  res.scalar_forcing = std::max(std::abs(vip[0] - z1_force), std::abs(vip[1] - z2_force));

  res.decoupling = decoupling_residual(dec.V_theta, dec.B);
  res.u_h_first_row = norm_inf(tr.u_h.row(0));
  res.u_p_first = std::abs(tr.u_p[0] - net.p_star_sum() / (double(n) * e));

  if (res.eigen > 1e-8)
    throw NumericError("decompose: closed-form eigenpairs fail the residual check (" +
                       fmt(res.eigen) + ")");
  for (std::size_t j = 1; j < 2 * n; ++j)
    if (!(dec.lambda[j] < 0.0))
      throw NumericError("decompose: nonnegative eigenvalue at index " + std::to_string(j + 1));
  if (res.input_transform > kTransformTol * scale_h)
    throw NumericError("decompose: V^-1 H != Gamma U_H (" + fmt(res.input_transform) + ")");
  if (res.forcing_transform > kTransformTol * scale_p)
    throw NumericError("decompose: V^-1 Pbar != -Gamma U_P on the coupled modes (" +
                       fmt(res.forcing_transform) + ")");
  if (res.scalar_forcing > kTransformTol * std::max(1.0, std::abs(z2_force)))
    throw NumericError("decompose: scalar-mode forcing mismatch (" + fmt(res.scalar_forcing) + ")");
  if (res.decoupling > kLaplacianIdentityTol)
    throw NumericError("decompose: first two columns of B^T V_theta are not zero");
  return dec;
}

}  // namespace mgc
