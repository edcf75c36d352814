#ifndef CHEBFEM_QUADRATURE_HPP
#define CHEBFEM_QUADRATURE_HPP

#include <functional>
#include <stdexcept>
#include <vector>

namespace chebfem {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gauss-Legendre rule on [-1,1]; nodes strictly increasing, symmetric about
/// zero, weights positive with sum 2.
struct QuadRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

/// n-point rule, exact for polynomials of degree <= 2n-1. Nodes from Newton
/// iteration on the Legendre recurrence, converged to ~1e-15.
QuadRule1D gauss_legendre(int n);

/// Tensor-product integral of f over [-1,1]^2 with nu x nv Gauss points.
/// A non-finite integrand value raises IntegrationError naming the point.
double integrate2d(const std::function<double(double, double)>& f, int nu, int nv);

}  // namespace chebfem

#endif
