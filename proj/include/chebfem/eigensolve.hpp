#ifndef CHEBFEM_EIGENSOLVE_HPP
#define CHEBFEM_EIGENSOLVE_HPP

#include <stdexcept>
#include <vector>

#include "chebfem/assembly.hpp"
#include "chebfem/matrix.hpp"

namespace chebfem {

/// Cholesky of the mass matrix failed; signals an assembly bug rather than a
/// property of the physics.
class MassNotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cavity spectrum: generalized eigenvalues k0^2 of S x = k0^2 M x with the
/// discrete-gradient nullspace filtered out.
struct Spectrum {
  std::vector<double> eigenvalues;  // retained, ascending
  int nullspace_count = 0;
  double filter_tol = 1e-8;
  std::vector<double> raw;  // all eigenvalues ascending, nullspace included
  Mat vectors;              // columns: eigenvectors of retained modes (if requested)
};

/// In-place lower Cholesky factor; returns false on a non-positive pivot.
bool cholesky_in_place(Mat& a);

/// Cyclic Jacobi diagonalization of a symmetric matrix (destroys `a`).
/// Sweeps continue until the off-diagonal Frobenius norm falls below
/// tol * ||A||_F (and then to the roundoff floor, which the quadratic tail
/// of Jacobi reaches in one or two extra sweeps).
void jacobi_eigen(Mat a, std::vector<double>& eigenvalues, Mat* vectors, double tol = 1e-12);

/// M = L L^t, C = L^-1 S L^-t, Jacobi on C; eigenvalues clamped at
/// -1e-10 * lambda_max and filtered below filter_tol * lambda_max.
Spectrum spectrum(const GlobalSystem& sys, double filter_tol = 1e-8, bool want_vectors = false);

/// Generalized eigenvalues of an explicit (S, M) pair; same pipeline.
Spectrum spectrum_of(const Mat& s, const Mat& m, double filter_tol = 1e-8,
                     bool want_vectors = false);

}  // namespace chebfem

#endif
