#include "chebfem/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace chebfem {

bool cholesky_in_place(Mat& a) {
  const int n = a.rows();
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      const double* ri = a.row(i);
      const double* rj = a.row(j);
      for (int k = 0; k < j; ++k) s -= ri[k] * rj[k];
      a(i, j) = s / ljj;
    }
  }
  // zero the strict upper triangle so `a` is the factor itself
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) a(i, j) = 0.0;
  }
  return true;
}

namespace {

double offdiag_norm(const Mat& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  }
  return std::sqrt(2.0 * s);
}

double frobenius(const Mat& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

// L y = b, forward substitution over columns of B in place.
void forward_solve_in_place(const Mat& l, Mat& b) {
  const int n = l.rows();
  for (int i = 0; i < n; ++i) {
    const double* li = l.row(i);
    double* bi = b.row(i);
    for (int k = 0; k < i; ++k) {
      const double c = li[k];
      if (c == 0.0) continue;
      const double* bk = b.row(k);
      for (int j = 0; j < b.cols(); ++j) bi[j] -= c * bk[j];
    }
    const double inv = 1.0 / li[i];
    for (int j = 0; j < b.cols(); ++j) bi[j] *= inv;
  }
}

// L^t x = b for a single vector.
void backward_solve_vector(const Mat& l, std::vector<double>& x) {
  const int n = l.rows();
  for (int i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) s -= l(k, i) * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / l(i, i);
  }
}

}  // namespace

void jacobi_eigen(Mat a, std::vector<double>& eigenvalues, Mat* vectors, double tol) {
  const int n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("jacobi_eigen: matrix must be square");
  if (vectors) {
    *vectors = Mat(n, n);
    for (int i = 0; i < n; ++i) (*vectors)(i, i) = 1.0;
  }
  eigenvalues.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 0) return;
  if (n == 1) {
    eigenvalues[0] = a(0, 0);
    return;
  }

  const double norm = frobenius(a);
  const double target = tol * norm;
  const double floor = 1e-15 * norm;
  double off = offdiag_norm(a);
  const int max_sweeps = 60;
  int sweep = 0;
  while (off > std::max(target * 1e-3, floor) && sweep < max_sweeps) {
    // once under target, Jacobi converges quadratically; a couple more
    // sweeps push the off-diagonal norm to the roundoff floor
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0) ? 1.0 / (theta + std::sqrt(theta * theta + 1.0))
                                        : 1.0 / (theta - std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        double* rp = a.row(p);
        double* rq = a.row(q);
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = rp[r];
          const double arq = rq[r];
          const double np_ = arp - s * (arq + tau * arp);
          const double nq_ = arq + s * (arp - tau * arq);
          rp[r] = np_;
          rq[r] = nq_;
          a(r, p) = np_;
          a(r, q) = nq_;
        }
        if (vectors) {
          for (int r = 0; r < n; ++r) {
            const double vrp = (*vectors)(r, p);
            const double vrq = (*vectors)(r, q);
            (*vectors)(r, p) = vrp - s * (vrq + tau * vrp);
            (*vectors)(r, q) = vrq + s * (vrp - tau * vrq);
          }
        }
      }
    }
    const double new_off = offdiag_norm(a);
    const bool stagnated = new_off >= off;
    off = new_off;
    ++sweep;
    if (stagnated && off <= target) break;  // stagnated at the roundoff level
  }
  if (off > target) {
    throw std::runtime_error("jacobi_eigen: no convergence after " +
                             std::to_string(max_sweeps) + " sweeps");
  }
  for (int i = 0; i < n; ++i) eigenvalues[static_cast<std::size_t>(i)] = a(i, i);
}

Spectrum spectrum_of(const Mat& s_mat, const Mat& m_mat, double filter_tol, bool want_vectors) {
  const int n = s_mat.rows();
  if (n != s_mat.cols() || n != m_mat.rows() || n != m_mat.cols()) {
    throw std::invalid_argument("spectrum: S and M must be square of equal size");
  }

  Mat l = m_mat;
  if (!cholesky_in_place(l)) {
    throw MassNotPositiveDefinite("mass matrix is not positive definite (assembly bug?)");
  }

  // C = L^-1 S L^-t, formed by two triangular solves
  Mat c = s_mat;
  forward_solve_in_place(l, c);     // c = L^-1 S
  c = transpose(c);                 // c = S^t L^-t = (L^-1 S)^t
  forward_solve_in_place(l, c);     // c = L^-1 S^t L^-t
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = avg;
      c(j, i) = avg;
    }
  }

  std::vector<double> lam;
  Mat vecs;
  jacobi_eigen(std::move(c), lam, want_vectors ? &vecs : nullptr);

  std::vector<int> order(lam.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return lam[static_cast<std::size_t>(a)] < lam[static_cast<std::size_t>(b)];
  });

  Spectrum spec;
  spec.filter_tol = filter_tol;
  spec.raw.reserve(lam.size());
  double lambda_max = 0.0;
  for (int idx : order) lambda_max = std::max(lambda_max, lam[static_cast<std::size_t>(idx)]);

  std::vector<int> retained_cols;
  for (int idx : order) {
    double v = lam[static_cast<std::size_t>(idx)];
    if (v < 0.0) {
      if (v < -1e-10 * lambda_max) {
        throw std::runtime_error("spectrum: negative eigenvalue " + std::to_string(v) +
                                 " beyond clamp tolerance");
      }
      v = 0.0;
    }
    spec.raw.push_back(v);
    if (v < filter_tol * lambda_max) {
      ++spec.nullspace_count;
    } else {
      spec.eigenvalues.push_back(v);
      retained_cols.push_back(idx);
    }
  }

  if (want_vectors) {
    spec.vectors = Mat(n, static_cast<int>(retained_cols.size()));
    std::vector<double> x(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < retained_cols.size(); ++k) {
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = vecs(i, retained_cols[k]);
      backward_solve_vector(l, x);  // x = L^-t y
      for (int i = 0; i < n; ++i) spec.vectors(i, static_cast<int>(k)) = x[static_cast<std::size_t>(i)];
    }
  }
  return spec;
}

Spectrum spectrum(const GlobalSystem& sys, double filter_tol, bool want_vectors) {
  return spectrum_of(sys.S, sys.M, filter_tol, want_vectors);
}

}  // namespace chebfem
