#include "mlssl/elliptic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mlssl {

namespace {

double agm(double a, double b) {
  while (std::abs(a - b) > 1e-16 * std::abs(a)) {
    double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    if (a == 0.0 || b == 0.0) break;
  }
  return 0.5 * (a + b);
}

// Landen recursion on the parameter mm = k^2.
JacobiElliptic ellipjc_param(std::complex<double> u, double mm) {
  if (mm < 4.0 * std::numeric_limits<double>::epsilon()) {
    std::complex<double> sinu = std::sin(u);
    std::complex<double> cosu = std::cos(u);
    JacobiElliptic out;
    out.sn = sinu + mm / 4.0 * (sinu * cosu - u) * cosu;
    out.cn = cosu + mm / 4.0 * (-sinu * cosu + u) * sinu;
    out.dn = 1.0 + mm / 4.0 * (cosu * cosu - sinu * sinu - 1.0);
    return out;
  }
  // kappa = (1 - sqrt(1-mm)) / (1 + sqrt(1-mm)) in the cancellation-free form
  double s = std::sqrt(1.0 - mm);
  double kappa = mm / ((1.0 + s) * (1.0 + s));
  JacobiElliptic in = ellipjc_param(u / (1.0 + kappa), kappa * kappa);
  std::complex<double> sn2 = in.sn * in.sn;
  std::complex<double> denom = 1.0 + kappa * sn2;
  JacobiElliptic out;
  out.sn = (1.0 + kappa) * in.sn / denom;
  out.cn = in.cn * in.dn / denom;
  out.dn = (1.0 - kappa * sn2) / denom;
  return out;
}

}  // namespace

EllipticKPair ellipkkp(double k) {
  if (!(k >= 0.0) || k >= 1.0)
    throw std::domain_error("ellipkkp: modulus must satisfy 0 <= k < 1");
  const double half_pi = std::numbers::pi / 2.0;
  EllipticKPair out;
  out.k = half_pi / agm(1.0, std::sqrt((1.0 - k) * (1.0 + k)));
  out.k_prime = (k == 0.0) ? std::numeric_limits<double>::infinity()
                           : half_pi / agm(1.0, k);
  return out;
}

JacobiElliptic ellipjc(std::complex<double> u, double k) {
  if (!(k >= 0.0) || k >= 1.0)
    throw std::domain_error("ellipjc: modulus must satisfy 0 <= k < 1");
  if (!std::isfinite(u.real()) || !std::isfinite(u.imag()))
    throw std::domain_error("ellipjc: non-finite argument");
  return ellipjc_param(u, k * k);
}

index_t num_contour_points(double m, double big_m, double tau) {
  if (!(m > 0.0) || !(big_m > m))
    throw std::domain_error("num_contour_points: need 0 < m < M");
  if (!(tau > 0.0) || !(tau < 1.0))
    throw std::domain_error("num_contour_points: need 0 < tau < 1");
  const double pi = std::numbers::pi;
  double raw = (std::log(big_m / m) + 6.0) * std::abs(std::log(tau)) /
               (2.0 * pi * pi);
  index_t n = static_cast<index_t>(std::ceil(raw));
  return n < 1 ? 1 : n;
}

ContourQuadrature contour_coefficients(double m, double big_m, index_t n,
                                       int p) {
  if (!(m > 0.0) || !(big_m > m))
    throw std::domain_error("contour_coefficients: need 0 < m < M");
  if (n < 1) throw std::domain_error("contour_coefficients: need N >= 1");
  if (p >= 0)
    throw std::domain_error("contour_coefficients: p must be a negative integer");

  ContourQuadrature quad;
  quad.n_points = n;
  quad.p = p;
  quad.m = m;
  quad.big_m = big_m;
  double q = std::pow(big_m / m, 0.25);
  double k = (q - 1.0) / (q + 1.0);
  quad.k_modulus = k;
  EllipticKPair kk = ellipkkp(k);
  quad.k_elliptic = kk.k;
  quad.k_elliptic_prime = kk.k_prime;
  const double pi = std::numbers::pi;
  double root4 = std::pow(m * big_m, 0.25);
  quad.prefactor = -8.0 * kk.k * root4 / (pi * static_cast<double>(n) * k);

  quad.nodes.resize(static_cast<std::size_t>(n));
  quad.node_weights.resize(static_cast<std::size_t>(n));
  const double inv_k = 1.0 / k;
  const double inv_p = 1.0 / static_cast<double>(p);
  for (index_t i = 0; i < n; ++i) {
    std::complex<double> t(-kk.k + (static_cast<double>(i) + 0.5) * 2.0 *
                                       kk.k / static_cast<double>(n),
                           kk.k_prime / 2.0);
    JacobiElliptic je = ellipjc(t, k);
    std::complex<double> z = root4 * (inv_k + je.sn) / (inv_k - je.sn);
    std::complex<double> phi = std::pow(z * z, inv_p);  // principal branch
    std::complex<double> denom = inv_k - je.sn;
    std::complex<double> w = phi * je.cn * je.dn / (z * denom * denom);
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) ||
        !std::isfinite(w.real()) || !std::isfinite(w.imag()) ||
        std::abs(z) == 0.0)
      throw std::runtime_error("contour_coefficients: non-finite node " +
                               std::to_string(i));
    quad.nodes[static_cast<std::size_t>(i)] = z;
    quad.node_weights[static_cast<std::size_t>(i)] = w;
  }
  return quad;
}

double contour_apply_scalar(const ContourQuadrature& quad, double s) {
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    std::complex<double> z2 = quad.nodes[i] * quad.nodes[i];
    acc += quad.node_weights[i] * z2 / (z2 - s);
  }
  return quad.prefactor * acc.imag();
}

}  // namespace mlssl
