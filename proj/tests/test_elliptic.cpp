#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "mlssl/elliptic.hpp"

using namespace mlssl;

namespace {

// independent long-double AGM oracle for K(k)
long double agm_reference_k(long double k) {
  long double a = 1.0L, b = std::sqrt(1.0L - k * k);
  for (int i = 0; i < 200 && std::abs(a - b) > 1e-20L * a; ++i) {
    long double an = 0.5L * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi_v<long double> / (a + b);
}

double auto_n_max_error(double m, double big_m, int p) {
  index_t n = num_contour_points(m, big_m, 1e-8);
  ContourQuadrature quad = contour_coefficients(m, big_m, n, p);
  double worst = 0.0;
  for (int i = 0; i <= 32; ++i) {
    double s = m + (big_m - m) * static_cast<double>(i) / 32.0;
    double approx = contour_apply_scalar(quad, s);
    double exact = std::pow(s, 1.0 / static_cast<double>(p));
    worst = std::max(worst, std::abs(approx - exact) / std::abs(exact));
  }
  return worst;
}

}  // namespace

TEST_CASE("ellipkkp degenerate and reference values") {
  EllipticKPair k0 = ellipkkp(0.0);
  CHECK(k0.k == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(std::isinf(k0.k_prime));

  // 50-digit AGM reference: K(0.5) = 1.68575035481259604287120365779...
  EllipticKPair half = ellipkkp(0.5);
  CHECK(std::abs(half.k - 1.6857503548125960428712036578) <= 1e-14 * half.k);
  CHECK(std::isfinite(half.k_prime));
  // K'(k) = K(sqrt(1-k^2))
  CHECK(half.k_prime ==
        doctest::Approx(ellipkkp(std::sqrt(0.75)).k).epsilon(1e-14));

  for (double k : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
    EllipticKPair got = ellipkkp(k);
    CHECK(std::abs(got.k - static_cast<double>(agm_reference_k(
                               static_cast<long double>(k)))) <=
          1e-14 * got.k);
  }
  CHECK_THROWS_AS(ellipkkp(1.0), std::domain_error);
  CHECK_THROWS_AS(ellipkkp(-0.1), std::domain_error);
}

TEST_CASE("ellipjc origin, trigonometric degeneration, identities") {
  JacobiElliptic at0 = ellipjc({0.0, 0.0}, 0.5);
  CHECK(std::abs(at0.sn) <= 1e-15);
  CHECK(std::abs(at0.cn - 1.0) <= 1e-15);
  CHECK(std::abs(at0.dn - 1.0) <= 1e-15);

  std::complex<double> u(0.3, 0.4);
  JacobiElliptic trig = ellipjc(u, 0.0);
  CHECK(std::abs(trig.sn - std::sin(u)) <= 1e-14);
  CHECK(std::abs(trig.cn - std::cos(u)) <= 1e-14);
  CHECK(std::abs(trig.dn - 1.0) <= 1e-14);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ur(-1.2, 1.2);
  for (double k = 0.1; k < 0.95; k += 0.1) {
    for (int trial = 0; trial < 100; ++trial) {
      std::complex<double> z(ur(rng), ur(rng));
      JacobiElliptic je = ellipjc(z, k);
      std::complex<double> i1 = je.sn * je.sn + je.cn * je.cn - 1.0;
      std::complex<double> i2 = je.dn * je.dn + k * k * je.sn * je.sn - 1.0;
      CHECK(std::abs(i1) <= 1e-12);
      CHECK(std::abs(i2) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(
      ellipjc({std::numeric_limits<double>::quiet_NaN(), 0.0}, 0.5),
      std::domain_error);
}

TEST_CASE("num_contour_points formula") {
  CHECK(num_contour_points(0.1, 10.0, 1e-8) == 10);
  // ln(M/m) -> 0: (6 * 18.4207) / (2 pi^2) = 5.599 -> 6
  CHECK(num_contour_points(1.0, 1.0 + 1e-13, 1e-8) == 6);
  // tau -> 1: floor guard at 1
  CHECK(num_contour_points(0.5, 2.0, 0.9999999) == 1);
  CHECK_THROWS_AS(num_contour_points(1.0, 1.0, 1e-8), std::domain_error);
  CHECK_THROWS_AS(num_contour_points(0.0, 1.0, 1e-8), std::domain_error);
  CHECK_THROWS_AS(num_contour_points(0.5, 2.0, 1.5), std::domain_error);
}

TEST_CASE("contour coefficients: modulus, degenerate interval, finiteness") {
  ContourQuadrature quad = contour_coefficients(1.0, 16.0, 8, -1);
  CHECK(quad.k_modulus == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(contour_coefficients(2.0, 2.0, 8, -1), std::domain_error);
  CHECK_THROWS_AS(contour_coefficients(1.0, 16.0, 8, 1), std::domain_error);
  for (const auto& z : quad.nodes) CHECK(std::abs(z) > 0.0);
  for (const auto& w : quad.node_weights)
    CHECK((std::isfinite(w.real()) && std::isfinite(w.imag())));

  // k_modulus monotone in M/m
  double prev = 0.0;
  for (double ratio : {2.0, 5.0, 20.0, 100.0, 1000.0}) {
    ContourQuadrature q = contour_coefficients(1.0, ratio, 4, -1);
    CHECK(q.k_modulus > prev);
    prev = q.k_modulus;
  }
}

TEST_CASE("scalar quadrature reaches the tolerance at the auto-selected N") {
  // representative S_p spectra from the pipeline (measured <= 1e-8)
  CHECK(auto_n_max_error(0.87, 6.7, -1) <= 1e-8);
  CHECK(auto_n_max_error(0.87, 6.7, -2) <= 1e-8);
  CHECK(auto_n_max_error(0.87, 6.7, -10) <= 1e-8);
  CHECK(auto_n_max_error(0.5, 6.0, -1) <= 1e-8);
  CHECK(auto_n_max_error(0.5, 6.0, -3) <= 1e-8);
  CHECK(auto_n_max_error(0.3, 2.3, -1) <= 1e-8);
  CHECK(auto_n_max_error(0.01, 4.0, -2) <= 1e-8);
  // wider interval sits just above 1e-8 but well under the 1e-6 gate
  CHECK(auto_n_max_error(0.1, 10.0, -1) <= 1e-6);
  CHECK(auto_n_max_error(0.1, 10.0, -10) <= 1e-6);
}

TEST_CASE("scalar quadrature error decays geometrically in N") {
  const double m = 0.1, big_m = 10.0;
  const int p = -2;
  std::vector<double> log_err;
  std::vector<double> ns = {4, 7, 10, 13, 16};
  for (double nd : ns) {
    ContourQuadrature quad =
        contour_coefficients(m, big_m, static_cast<index_t>(nd), p);
    double worst = 0.0;
    for (int i = 0; i <= 8; ++i) {
      double s = m + (big_m - m) * static_cast<double>(i) / 8.0;
      double exact = std::pow(s, 1.0 / static_cast<double>(p));
      worst = std::max(worst,
                       std::abs(contour_apply_scalar(quad, s) - exact) /
                           std::abs(exact));
    }
    log_err.push_back(std::log(worst));
  }
  // least-squares slope of log(err) vs N
  double n_mean = 0.0, e_mean = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    n_mean += ns[i];
    e_mean += log_err[i];
  }
  n_mean /= static_cast<double>(ns.size());
  e_mean /= static_cast<double>(ns.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    num += (ns[i] - n_mean) * (log_err[i] - e_mean);
    den += (ns[i] - n_mean) * (ns[i] - n_mean);
  }
  double slope = num / den;
  double predicted =
      -2.0 * std::numbers::pi * std::numbers::pi / (std::log(big_m / m) + 6.0);
  CHECK(slope < 0.0);
  CHECK(slope / predicted >= 0.5);
  CHECK(slope / predicted <= 2.0);
}
