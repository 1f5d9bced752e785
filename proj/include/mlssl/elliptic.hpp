#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "mlssl/sparse.hpp"

namespace mlssl {

struct EllipticKPair {
  double k;        // complete elliptic integral of the first kind at modulus k
  double k_prime;  // same at the complementary modulus sqrt(1-k^2)
};

/// Complete elliptic integrals K(k) and K'(k) by arithmetic-geometric mean
/// iteration. The complementary integral is evaluated as pi/(2 AGM(1, k)),
/// which never forms sqrt(1 - k'^2) and so has no cancellation for small k.
/// K'(0) is +infinity. Requires 0 <= k < 1.
EllipticKPair ellipkkp(double k);

struct JacobiElliptic {
  std::complex<double> sn;
  std::complex<double> cn;
  std::complex<double> dn;
};

/// Jacobi elliptic functions at complex argument, modulus k in [0,1),
/// computed by the descending Landen transformation with a trigonometric
/// base case.
JacobiElliptic ellipjc(std::complex<double> u, double k);

/// N = ceil((ln(M/m) + 6) |ln tau| / (2 pi^2)), at least 1.
index_t num_contour_points(double m, double big_m, double tau);

/// Quadrature data for z^{1/p} on a spectrum inside [m, M], negative
/// integer p. Nodes are midpoints of the rectangle segment at height K'/2
/// of the conformal map; weights are phi(z^2) c d / (z (1/k - s)^2).
struct ContourQuadrature {
  index_t n_points = 0;
  int p = -1;
  double m = 0.0;
  double big_m = 0.0;
  double k_modulus = 0.0;
  double k_elliptic = 0.0;        // K(k)
  double k_elliptic_prime = 0.0;  // K'(k)
  double prefactor = 0.0;         // -8 K (mM)^{1/4} / (pi N k)
  std::vector<std::complex<double>> nodes;        // z_i
  std::vector<std::complex<double>> node_weights; // w_i
};

ContourQuadrature contour_coefficients(double m, double big_m, index_t n,
                                       int p);

/// Applies the quadrature to a scalar s in [m, M]: returns the N-point
/// approximation of s^{1/p}. The sum uses the resolvent identity form
/// w_i z_i^2 / (z_i^2 - s); see apply_power_mean_vector for the operator
/// version.
double contour_apply_scalar(const ContourQuadrature& quad, double s);

}  // namespace mlssl
