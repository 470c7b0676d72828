#pragma once

#include <vector>

namespace casimir {

// Dense symmetric 2r x 2r matrix M_r of the saddle-point expansion:
// unit diagonal, cyclic nearest-neighbour couplings alternating
// -(1 - mu), -mu. For r = 1 both couplings land on the same entry (-1).
struct SaddleMatrix {
  int r = 0;
  double mu = 0.0;
  std::vector<double> entries;  // row-major, size (2r)^2

  int size() const { return 2 * r; }
  double operator()(int i, int j) const { return entries[static_cast<std::size_t>(i) * size() + j]; }
};

SaddleMatrix build_m_r(int r, double mu);

// lambda_pm^(j) = 1 +- sqrt(1 - 4 mu (1 - mu) sin^2(pi j / r)), j = 0..r-1,
// returned in ascending order.
std::vector<double> eigenvalues(int r, double mu);

// Cyclic Jacobi rotations; `a` is row-major n x n symmetric. Ascending output.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

// prod_{j=1}^{r-1} sin(pi j / r) = r / 2^{r-1}
double sine_product(int r);
double sine_product_direct(int r);

// (prod of nonzero Hessian eigenvalues)^{-1/2}
//   = (R_eff / 4 r^2) (k/kappa) (4 kappa^2 / (k^2 R1 R2))^r
double hessian_nonzero_product(int r, double mu, double r1, double r2, double k_star,
                               double kappa_star);

// Same quantity from the numerically diagonalized blocks
// (R1 + R2) M_r / (2 kappa) and (R1 + R2) k^2 M_r / (2 kappa), dropping the
// zero mode of each block.
double hessian_nonzero_product_numeric(int r, double mu, double r1, double r2, double k_star,
                                       double kappa_star);

}  // namespace casimir
