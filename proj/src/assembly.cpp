#include "chebfem/assembly.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "chebfem/chebyshev.hpp"
#include "chebfem/quadrature.hpp"

namespace chebfem {

const char* backend_name(Backend b) { return b == Backend::direct ? "direct" : "p2s"; }

Backend backend_from_name(const std::string& name) {
  if (name == "direct") return Backend::direct;
  if (name == "p2s") return Backend::p2s;
  throw std::invalid_argument("unknown backend '" + name + "' (expected direct or p2s)");
}

int default_quad_points(const Orders& orders, int geometric_order) {
  return std::max(orders.M, orders.N) + geometric_order + 6;
}

namespace {

// Tabulated per-element quadrature data: coupling-factor grids with the
// quadrature weights folded in, and 1-D polynomial values at the nodes.
struct ElementQuad {
  int nq = 0;
  Mat ws;   // w_i w_j / (mu_r J)
  Mat wuu;  // w_i w_j eps_r (x_v^2 + y_v^2) / J
  Mat wuv;  // w_i w_j eps_r (x_u x_v + y_u y_v) / J
  Mat wvv;  // w_i w_j eps_r (x_u^2 + y_u^2) / J
  Mat Tu, Uu, Tnsu;  // [degree][node] along u
  Mat Tv, Uv, Tnsv;  // [degree][node] along v
};

Mat poly_table(PolyFamily fam, int max_degree, const std::vector<double>& nodes) {
  Mat t(max_degree + 1, static_cast<int>(nodes.size()));
  for (int d = 0; d <= max_degree; ++d) {
    for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
      t(d, i) = eval_poly(fam, d, nodes[static_cast<std::size_t>(i)]);
    }
  }
  return t;
}

ElementQuad build_element_quad(const Mesh& mesh, int elem_index, const Orders& orders, int nq) {
  const CurvedQuadElement& elem = mesh.elements[static_cast<std::size_t>(elem_index)];
  const QuadRule1D rule = gauss_legendre(nq);
  const int p = elem.order;
  const int np = p + 1;

  // Lagrange values/derivatives at the quadrature nodes
  Mat L(np, nq), dL(np, nq);
  {
    std::vector<double> val(static_cast<std::size_t>(np)), der(static_cast<std::size_t>(np));
    for (int i = 0; i < nq; ++i) {
      lagrange_basis(p, rule.nodes[static_cast<std::size_t>(i)], val, der);
      for (int a = 0; a < np; ++a) {
        L(a, i) = val[static_cast<std::size_t>(a)];
        dL(a, i) = der[static_cast<std::size_t>(a)];
      }
    }
  }

  ElementQuad q;
  q.nq = nq;
  q.ws = Mat(nq, nq);
  q.wuu = Mat(nq, nq);
  q.wuv = Mat(nq, nq);
  q.wvv = Mat(nq, nq);

  for (int j = 0; j < nq; ++j) {
    for (int i = 0; i < nq; ++i) {
      double x = 0, y = 0, x_u = 0, x_v = 0, y_u = 0, y_v = 0;
      for (int b = 0; b < np; ++b) {
        for (int a = 0; a < np; ++a) {
          const Node2& node =
              mesh.nodes[static_cast<std::size_t>(elem.nodes[static_cast<std::size_t>(a + np * b)])];
          const double w = L(a, i) * L(b, j);
          const double wu = dL(a, i) * L(b, j);
          const double wv = L(a, i) * dL(b, j);
          x += w * node.x;
          y += w * node.y;
          x_u += wu * node.x;
          y_u += wu * node.y;
          x_v += wv * node.x;
          y_v += wv * node.y;
        }
      }
      const double J = x_u * y_v - x_v * y_u;
      if (!(J > 0.0)) {
        throw GeometryError("element " + std::to_string(elem_index) +
                            ": non-positive Jacobian at a quadrature point");
      }
      const double eps = eval_expr(mesh.materials.eps_r, x, y);
      const double mu = eval_expr(mesh.materials.mu_r, x, y);
      const double w2 = rule.weights[static_cast<std::size_t>(i)] * rule.weights[static_cast<std::size_t>(j)];
      q.ws(i, j) = w2 / (mu * J);
      q.wuu(i, j) = w2 * eps * (x_v * x_v + y_v * y_v) / J;
      q.wuv(i, j) = w2 * eps * (x_u * x_v + y_u * y_v) / J;
      q.wvv(i, j) = w2 * eps * (x_u * x_u + y_u * y_u) / J;
    }
  }

  const int mu_deg = 2 * orders.M;
  const int nv_deg = 2 * orders.N;
  q.Tu = poly_table(PolyFamily::T, mu_deg, rule.nodes);
  q.Uu = poly_table(PolyFamily::U, std::max(mu_deg - 1, 1), rule.nodes);
  q.Tnsu = poly_table(PolyFamily::Tns, mu_deg, rule.nodes);
  q.Tv = poly_table(PolyFamily::T, nv_deg, rule.nodes);
  q.Uv = poly_table(PolyFamily::U, std::max(nv_deg - 1, 1), rule.nodes);
  q.Tnsv = poly_table(PolyFamily::Tns, nv_deg, rule.nodes);
  return q;
}

// One honest 2-D quadrature: sum_ij au_i bv_j W_ij.
double integrate_product(const ElementQuad& q, const Mat& w, const double* au, const double* bv) {
  double total = 0.0;
  for (int i = 0; i < q.nq; ++i) {
    const double* wrow = w.row(i);
    double r = 0.0;
    for (int j = 0; j < q.nq; ++j) r += bv[j] * wrow[j];
    total += au[i] * r;
  }
  return total;
}

// Pointwise product of two table rows into a scratch buffer.
void row_product(const Mat& table, int d1, int d2, std::vector<double>& out) {
  const double* r1 = table.row(d1);
  const double* r2 = table.row(d2);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = r1[i] * r2[i];
}

}  // namespace

ElementMatrices assemble_direct_element(const Mesh& mesh, int elem, const Orders& orders, int nq) {
  const ElementQuad q = build_element_quad(mesh, elem, orders, nq);
  const int M = orders.M;
  const int N = orders.N;

  ElementMatrices em;
  em.orders = orders;
  em.Suu = Mat(orders.n_eu(), orders.n_eu());
  em.Suv = Mat(orders.n_eu(), orders.n_ev());
  em.Svv = Mat(orders.n_ev(), orders.n_ev());
  em.Muu = Mat(orders.n_eu(), orders.n_eu());
  em.Muv = Mat(orders.n_eu(), orders.n_ev());
  em.Mvv = Mat(orders.n_ev(), orders.n_ev());

  std::vector<double> au(static_cast<std::size_t>(nq));
  std::vector<double> bv(static_cast<std::size_t>(nq));

  const auto eu = [&](int m, int n) { return m * (N + 1) + n; };
  const auto ev = [&](int m, int n) { return m * N + n; };

  // S_uu = n1 n2 // U_m1 U_m2 (u) U_{n1-1} U_{n2-1} (v) / (mu_r J);
  // the integral depends only on the unordered index pairs, so canonical
  // pairs are integrated once and mirrored (four-fold symmetry).
  for (int m1 = 0; m1 < M; ++m1) {
    for (int m2 = m1; m2 < M; ++m2) {
      row_product(q.Uu, m1, m2, au);
      for (int n1 = 1; n1 <= N; ++n1) {
        for (int n2 = n1; n2 <= N; ++n2) {
          row_product(q.Uv, n1 - 1, n2 - 1, bv);
          const double base = integrate_product(q, q.ws, au.data(), bv.data());
          ++em.n_integrals;
          em.Suu(eu(m1, n1), eu(m2, n2)) = n1 * n2 * base;
          em.Suu(eu(m2, n1), eu(m1, n2)) = n1 * n2 * base;
          em.Suu(eu(m1, n2), eu(m2, n1)) = n1 * n2 * base;
          em.Suu(eu(m2, n2), eu(m1, n1)) = n1 * n2 * base;
        }
      }
    }
  }

  // S_uv = -n1 m2 // U_m1 U_{m2-1} (u) U_{n1-1} U_n2 (v) / (mu_r J)
  for (int m1 = 0; m1 < M; ++m1) {
    for (int m2 = 1; m2 <= M; ++m2) {
      row_product(q.Uu, m1, m2 - 1, au);
      for (int n1 = 1; n1 <= N; ++n1) {
        for (int n2 = 0; n2 < N; ++n2) {
          row_product(q.Uv, n1 - 1, n2, bv);
          const double base = integrate_product(q, q.ws, au.data(), bv.data());
          ++em.n_integrals;
          em.Suv(eu(m1, n1), ev(m2, n2)) = -n1 * m2 * base;
        }
      }
    }
  }

  // S_vv = m1 m2 // U_{m1-1} U_{m2-1} (u) U_n1 U_n2 (v) / (mu_r J)
  for (int m1 = 1; m1 <= M; ++m1) {
    for (int m2 = m1; m2 <= M; ++m2) {
      row_product(q.Uu, m1 - 1, m2 - 1, au);
      for (int n1 = 0; n1 < N; ++n1) {
        for (int n2 = n1; n2 < N; ++n2) {
          row_product(q.Uv, n1, n2, bv);
          const double base = integrate_product(q, q.ws, au.data(), bv.data());
          ++em.n_integrals;
          em.Svv(ev(m1, n1), ev(m2, n2)) = m1 * m2 * base;
          em.Svv(ev(m2, n1), ev(m1, n2)) = m1 * m2 * base;
          em.Svv(ev(m1, n2), ev(m2, n1)) = m1 * m2 * base;
          em.Svv(ev(m2, n2), ev(m1, n1)) = m1 * m2 * base;
        }
      }
    }
  }

  // M_uu = // U_m1 U_m2 (u) T_n1 T_n2 (v) eps_r (x_v^2+y_v^2)/J
  for (int m1 = 0; m1 < M; ++m1) {
    for (int m2 = m1; m2 < M; ++m2) {
      row_product(q.Uu, m1, m2, au);
      for (int n1 = 0; n1 <= N; ++n1) {
        for (int n2 = n1; n2 <= N; ++n2) {
          row_product(q.Tv, n1, n2, bv);
          const double value = integrate_product(q, q.wuu, au.data(), bv.data());
          ++em.n_integrals;
          ++em.n_mass_uu_integrals;
          em.Muu(eu(m1, n1), eu(m2, n2)) = value;
          em.Muu(eu(m2, n1), eu(m1, n2)) = value;
          em.Muu(eu(m1, n2), eu(m2, n1)) = value;
          em.Muu(eu(m2, n2), eu(m1, n1)) = value;
        }
      }
    }
  }

  // M_uv = - // U_m1 T_m2 (u) T_n1 U_n2 (v) eps_r (x_u x_v + y_u y_v)/J
  for (int m1 = 0; m1 < M; ++m1) {
    for (int m2 = 0; m2 <= M; ++m2) {
      const double* u1 = q.Uu.row(m1);
      const double* t2 = q.Tu.row(m2);
      for (int i = 0; i < nq; ++i) au[static_cast<std::size_t>(i)] = u1[i] * t2[i];
      for (int n1 = 0; n1 <= N; ++n1) {
        for (int n2 = 0; n2 < N; ++n2) {
          const double* t1 = q.Tv.row(n1);
          const double* u2 = q.Uv.row(n2);
          for (int j = 0; j < nq; ++j) bv[static_cast<std::size_t>(j)] = t1[j] * u2[j];
          const double value = -integrate_product(q, q.wuv, au.data(), bv.data());
          ++em.n_integrals;
          em.Muv(eu(m1, n1), ev(m2, n2)) = value;
        }
      }
    }
  }

  // M_vv = // T_m1 T_m2 (u) U_n1 U_n2 (v) eps_r (x_u^2+y_u^2)/J
  for (int m1 = 0; m1 <= M; ++m1) {
    for (int m2 = m1; m2 <= M; ++m2) {
      row_product(q.Tu, m1, m2, au);
      for (int n1 = 0; n1 < N; ++n1) {
        for (int n2 = n1; n2 < N; ++n2) {
          row_product(q.Uv, n1, n2, bv);
          const double value = integrate_product(q, q.wvv, au.data(), bv.data());
          ++em.n_integrals;
          em.Mvv(ev(m1, n1), ev(m2, n2)) = value;
          em.Mvv(ev(m2, n1), ev(m1, n2)) = value;
          em.Mvv(ev(m1, n2), ev(m2, n1)) = value;
          em.Mvv(ev(m2, n2), ev(m1, n1)) = value;
        }
      }
    }
  }

  em.Svu = transpose(em.Suv);
  em.Mvu = transpose(em.Muv);
  return em;
}

KernelTable compute_kernel_tables(const Mesh& mesh, int elem, const Orders& orders, int nq) {
  const ElementQuad q = build_element_quad(mesh, elem, orders, nq);
  const int M2 = 2 * orders.M;
  const int N2 = 2 * orders.N;

  KernelTable kt;
  kt.orders = orders;
  kt.Ks = Mat(M2 + 1, N2 + 1);
  kt.Kuu = Mat(M2 + 1, N2 + 1);
  kt.Kuv = Mat(M2, N2);
  kt.Kvv = Mat(M2 + 1, N2 + 1);

  for (int m = 0; m <= M2; ++m) {
    for (int n = 0; n <= N2; ++n) {
      kt.Ks(m, n) = integrate_product(q, q.ws, q.Tnsu.row(m), q.Tnsv.row(n));
      ++kt.n_integrals;
    }
  }
  for (int m = 0; m <= M2; ++m) {
    for (int n = 0; n <= N2; ++n) {
      kt.Kuu(m, n) = integrate_product(q, q.wuu, q.Tnsu.row(m), q.Tv.row(n));
      ++kt.n_integrals;
      ++kt.n_mass_uu_integrals;
    }
  }
  for (int m = 0; m < M2; ++m) {
    for (int n = 0; n < N2; ++n) {
      kt.Kuv(m, n) = integrate_product(q, q.wuv, q.Uu.row(m), q.Uv.row(n));
      ++kt.n_integrals;
    }
  }
  for (int m = 0; m <= M2; ++m) {
    for (int n = 0; n <= N2; ++n) {
      kt.Kvv(m, n) = integrate_product(q, q.wvv, q.Tu.row(m), q.Tnsv.row(n));
      ++kt.n_integrals;
    }
  }
  return kt;
}

namespace {

// Product expansions are separable in the two index pairs, so they are built
// once per (a, b) pair instead of once per matrix entry, with the term
// degrees pre-resolved to kernel-table offsets. The per-entry work is then
// the promised handful of table lookups and adds.
struct FlatTerm {
  double coeff = 0.0;
  int offset = 0;  // row offset (u side) or column index (v side)
};

struct FlatExpansion {
  FlatTerm t[2];
  int n = 0;
};

class FlatTable {
 public:
  // u_side: offsets are degree * stride; otherwise plain degrees.
  FlatTable(PolyFamily fam_a, int na, PolyFamily fam_b, int nb, PolyFamily expect,
            int stride, bool u_side)
      : cols_(nb) {
    exp_.reserve(static_cast<std::size_t>(na) * static_cast<std::size_t>(nb));
    for (int a = 0; a < na; ++a) {
      for (int b = 0; b < nb; ++b) {
        const SumExpansion e = product_to_sum(fam_a, a, fam_b, b);
        FlatExpansion f;
        for (const SumTerm& term : e) {
          if (term.family != expect) throw std::logic_error("kernel table family mismatch");
          f.t[f.n].coeff = term.coeff;
          f.t[f.n].offset = u_side ? term.degree * stride : term.degree;
          ++f.n;
        }
        exp_.push_back(f);
      }
    }
  }

  const FlatExpansion& at(int a, int b) const {
    return exp_[static_cast<std::size_t>(a * cols_ + b)];
  }

 private:
  int cols_;
  std::vector<FlatExpansion> exp_;
};

inline double flat_combine(const double* table, const FlatExpansion& u, const FlatExpansion& v) {
  double s = 0.0;
  for (int i = 0; i < u.n; ++i) {
    const double cu = u.t[i].coeff;
    const double* row = table + u.t[i].offset;
    for (int j = 0; j < v.n; ++j) s += cu * v.t[j].coeff * row[v.t[j].offset];
  }
  return s;
}

}  // namespace

ElementMatrices assemble_p2s_element(const KernelTable& kt, const Orders& orders) {
  if (kt.orders.M != orders.M || kt.orders.N != orders.N) {
    throw std::invalid_argument("assemble_p2s_element: kernel table was built for other orders");
  }
  const int M = orders.M;
  const int N = orders.N;

  ElementMatrices em;
  em.orders = orders;
  em.Suu = Mat(orders.n_eu(), orders.n_eu());
  em.Suv = Mat(orders.n_eu(), orders.n_ev());
  em.Svv = Mat(orders.n_ev(), orders.n_ev());
  em.Muu = Mat(orders.n_eu(), orders.n_eu());
  em.Muv = Mat(orders.n_eu(), orders.n_ev());
  em.Mvv = Mat(orders.n_ev(), orders.n_ev());

  const auto eu = [&](int m, int n) { return m * (N + 1) + n; };
  const auto ev = [&](int m, int n) { return m * N + n; };
  using PF = PolyFamily;

  // Ks/Kuu/Kvv share the (2M+1)x(2N+1) layout; Kuv is 2M x 2N.
  const int stride = 2 * N + 1;
  const int mx = std::max(M, N);
  const FlatTable uu_rows(PF::U, mx + 1, PF::U, mx + 1, PF::Tns, stride, true);
  const FlatTable uu_cols(PF::U, mx + 1, PF::U, mx + 1, PF::Tns, 0, false);
  const FlatTable tt_rows(PF::T, M + 1, PF::T, M + 1, PF::T, stride, true);
  const FlatTable tt_cols(PF::T, N + 1, PF::T, N + 1, PF::T, 0, false);
  const FlatTable ut_rows(PF::U, M, PF::T, M + 1, PF::U, 2 * N, true);
  const FlatTable ut_cols(PF::U, N, PF::T, N + 1, PF::U, 0, false);

  const double* ks = kt.Ks.data().data();
  const double* kuu = kt.Kuu.data().data();
  const double* kuv = kt.Kuv.data().data();
  const double* kvv = kt.Kvv.data().data();

  // symmetric blocks: canonical upper triangle, mirrored
  for (int row = 0; row < orders.n_eu(); ++row) {
    const int m1 = row / (N + 1);
    const int n1 = row % (N + 1);
    for (int col = row; col < orders.n_eu(); ++col) {
      const int m2 = col / (N + 1);
      const int n2 = col % (N + 1);
      const FlatExpansion& uu = uu_rows.at(m1, m2);
      // S_uu: v-product U_{n1-1} U_{n2-1}, vanishing rows via n1 n2
      if (n1 >= 1 && n2 >= 1) {
        const double v = n1 * n2 * flat_combine(ks, uu, uu_cols.at(n1 - 1, n2 - 1));
        em.Suu(row, col) = v;
        em.Suu(col, row) = v;
      }
      // M_uu: v-product T_n1 T_n2
      const double w = flat_combine(kuu, uu, tt_cols.at(n1, n2));
      em.Muu(row, col) = w;
      em.Muu(col, row) = w;
    }
  }

  for (int m1 = 0; m1 < M; ++m1) {
    for (int m2 = 0; m2 <= M; ++m2) {
      const FlatExpansion& ut = ut_rows.at(m1, m2);
      const FlatExpansion* us = (m2 >= 1) ? &uu_rows.at(m1, m2 - 1) : nullptr;
      for (int n1 = 0; n1 <= N; ++n1) {
        double* suv_row = em.Suv.row(eu(m1, n1));
        double* muv_row = em.Muv.row(eu(m1, n1));
        for (int n2 = 0; n2 < N; ++n2) {
          // S_uv: u-product U_m1 U_{m2-1}, v-product U_{n1-1} U_n2
          if (m2 >= 1 && n1 >= 1) {
            suv_row[ev(m2, n2)] =
                -n1 * m2 * flat_combine(ks, *us, uu_cols.at(n1 - 1, n2));
          }
          // M_uv: u-product U_m1 T_m2, v-product T_n1 U_n2
          muv_row[ev(m2, n2)] = -flat_combine(kuv, ut, ut_cols.at(n2, n1));
        }
      }
    }
  }

  for (int row = 0; row < orders.n_ev(); ++row) {
    const int m1 = row / N;
    const int n1 = row % N;
    for (int col = row; col < orders.n_ev(); ++col) {
      const int m2 = col / N;
      const int n2 = col % N;
      const FlatExpansion& vv = uu_cols.at(n1, n2);
      // S_vv: u-product U_{m1-1} U_{m2-1}, v-product U_n1 U_n2
      if (m1 >= 1 && m2 >= 1) {
        const double v = m1 * m2 * flat_combine(ks, uu_rows.at(m1 - 1, m2 - 1), vv);
        em.Svv(row, col) = v;
        em.Svv(col, row) = v;
      }
      // M_vv: v-product U_n1 U_n2
      const double w = flat_combine(kvv, tt_rows.at(m1, m2), vv);
      em.Mvv(row, col) = w;
      em.Mvv(col, row) = w;
    }
  }

  em.Svu = transpose(em.Suv);
  em.Mvu = transpose(em.Muv);
  return em;
}

Mat conforming_matrix(int max_degree) {
  const int n = max_degree + 1;
  if (n < 2) throw std::invalid_argument("conforming_matrix: need degree >= 1");
  Mat r(n, n);
  r(0, 0) = 0.5;
  r(1, 0) = -0.5;
  r(0, 1) = 0.5;
  r(1, 1) = 0.5;
  for (int k = 2; k < n; ++k) {
    r(k, k) = 1.0;
    r(k % 2, k) = -1.0;
  }
  return r;
}

namespace {

// The change of basis mixes index k as
//   out_0 = (in_0 - in_1)/2, out_1 = (in_0 + in_1)/2,
//   out_n = in_n - in_{n mod 2}  (n >= 2),
// which runs in place when the n >= 2 rows are updated before rows 0 and 1.
// Four variants cover rows/columns with the transformed axis fast or slow.

// rows indexed (outer, k), k fastest
void rows_inner_inplace(Mat& b, int n_outer, int k_size) {
  const int cols = b.cols();
  for (int o = 0; o < n_outer; ++o) {
    for (int n = 2; n < k_size; ++n) {
      double* rn = b.row(o * k_size + n);
      const double* rp = b.row(o * k_size + (n & 1));
      for (int j = 0; j < cols; ++j) rn[j] -= rp[j];
    }
    double* r0 = b.row(o * k_size);
    double* r1 = b.row(o * k_size + 1);
    for (int j = 0; j < cols; ++j) {
      const double a = r0[j];
      const double c = r1[j];
      r0[j] = 0.5 * (a - c);
      r1[j] = 0.5 * (a + c);
    }
  }
}

// rows indexed (k, inner), k slowest
void rows_outer_inplace(Mat& b, int k_size, int n_inner) {
  const int cols = b.cols();
  for (int n = 2; n < k_size; ++n) {
    for (int i = 0; i < n_inner; ++i) {
      double* rn = b.row(n * n_inner + i);
      const double* rp = b.row((n & 1) * n_inner + i);
      for (int j = 0; j < cols; ++j) rn[j] -= rp[j];
    }
  }
  for (int i = 0; i < n_inner; ++i) {
    double* r0 = b.row(i);
    double* r1 = b.row(n_inner + i);
    for (int j = 0; j < cols; ++j) {
      const double a = r0[j];
      const double c = r1[j];
      r0[j] = 0.5 * (a - c);
      r1[j] = 0.5 * (a + c);
    }
  }
}

// columns indexed (outer, k), k fastest
void cols_inner_inplace(Mat& b, int n_outer, int k_size) {
  for (int r = 0; r < b.rows(); ++r) {
    double* row = b.row(r);
    for (int o = 0; o < n_outer; ++o) {
      double* x = row + o * k_size;
      for (int n = 2; n < k_size; ++n) x[n] -= x[n & 1];
      const double a = x[0];
      const double c = x[1];
      x[0] = 0.5 * (a - c);
      x[1] = 0.5 * (a + c);
    }
  }
}

// columns indexed (k, inner), k slowest
void cols_outer_inplace(Mat& b, int k_size, int n_inner) {
  for (int r = 0; r < b.rows(); ++r) {
    double* row = b.row(r);
    for (int n = 2; n < k_size; ++n) {
      for (int i = 0; i < n_inner; ++i) row[n * n_inner + i] -= row[(n & 1) * n_inner + i];
    }
    for (int i = 0; i < n_inner; ++i) {
      const double a = row[i];
      const double c = row[n_inner + i];
      row[i] = 0.5 * (a - c);
      row[n_inner + i] = 0.5 * (a + c);
    }
  }
}

}  // namespace

void apply_conforming_transform(ElementMatrices& em) {
  const int M = em.orders.M;
  const int N = em.orders.N;

  rows_inner_inplace(em.Suu, M, N + 1);
  cols_inner_inplace(em.Suu, M, N + 1);
  rows_inner_inplace(em.Muu, M, N + 1);
  cols_inner_inplace(em.Muu, M, N + 1);
  rows_inner_inplace(em.Suv, M, N + 1);
  cols_outer_inplace(em.Suv, M + 1, N);
  rows_inner_inplace(em.Muv, M, N + 1);
  cols_outer_inplace(em.Muv, M + 1, N);
  rows_outer_inplace(em.Svv, M + 1, N);
  cols_outer_inplace(em.Svv, M + 1, N);
  rows_outer_inplace(em.Mvv, M + 1, N);
  cols_outer_inplace(em.Mvv, M + 1, N);
  em.Svu = transpose(em.Suv);
  em.Mvu = transpose(em.Muv);
}

GlobalSystem assemble_global(const Mesh& mesh, const DofMap& dof_map,
                             const std::vector<ElementMatrices>& elements) {
  if (elements.size() != mesh.elements.size()) {
    throw std::invalid_argument("assemble_global: one ElementMatrices per mesh element required");
  }
  const Orders orders{dof_map.M, dof_map.N};
  const int n_eu = orders.n_eu();
  const int n_local = orders.n_local();

  GlobalSystem sys;
  sys.orders = orders;
  sys.dof_map = dof_map;
  sys.S = Mat(dof_map.n_free, dof_map.n_free);
  sys.M = Mat(dof_map.n_free, dof_map.n_free);

  const auto block_entry = [&](const ElementMatrices& em, bool stiffness, int i, int j) {
    const bool iu = i < n_eu;
    const bool ju = j < n_eu;
    const int bi = iu ? i : i - n_eu;
    const int bj = ju ? j : j - n_eu;
    if (stiffness) {
      if (iu && ju) return em.Suu(bi, bj);
      if (iu && !ju) return em.Suv(bi, bj);
      if (!iu && ju) return em.Svu(bi, bj);
      return em.Svv(bi, bj);
    }
    if (iu && ju) return em.Muu(bi, bj);
    if (iu && !ju) return em.Muv(bi, bj);
    if (!iu && ju) return em.Mvu(bi, bj);
    return em.Mvv(bi, bj);
  };

  for (std::size_t e = 0; e < elements.size(); ++e) {
    const std::vector<DofMap::LocalDof>& dofs = dof_map.element_dofs[e];
    sys.n_integrals += elements[e].n_integrals;
    for (int i = 0; i < n_local; ++i) {
      const int gi = dof_map.free_index[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)].global)];
      if (gi < 0) continue;
      const double si = dofs[static_cast<std::size_t>(i)].sign;
      for (int j = 0; j < n_local; ++j) {
        const int gj = dof_map.free_index[static_cast<std::size_t>(dofs[static_cast<std::size_t>(j)].global)];
        if (gj < 0) continue;
        const double w = si * dofs[static_cast<std::size_t>(j)].sign;
        sys.S(gi, gj) += w * block_entry(elements[e], true, i, j);
        sys.M(gi, gj) += w * block_entry(elements[e], false, i, j);
      }
    }
  }

  const double s_scale = max_abs(sys.S);
  const double m_scale = max_abs(sys.M);
  if (s_scale > 0.0 && max_asymmetry(sys.S) > 1e-10 * s_scale) {
    throw std::runtime_error("assemble_global: stiffness matrix asymmetric (sign/index bug)");
  }
  if (m_scale > 0.0 && max_asymmetry(sys.M) > 1e-10 * m_scale) {
    throw std::runtime_error("assemble_global: mass matrix asymmetric (sign/index bug)");
  }
  return sys;
}

std::vector<ElementMatrices> fill_elements(const Mesh& mesh, const Orders& orders,
                                           Backend backend, int nq, int threads) {
  const int n_elems = static_cast<int>(mesh.elements.size());
  std::vector<ElementMatrices> result(static_cast<std::size_t>(n_elems));

  const auto fill_one = [&](int e) {
    if (backend == Backend::direct) {
      result[static_cast<std::size_t>(e)] = assemble_direct_element(mesh, e, orders, nq);
    } else {
      const KernelTable kt = compute_kernel_tables(mesh, e, orders, nq);
      ElementMatrices em = assemble_p2s_element(kt, orders);
      em.n_integrals = kt.n_integrals;
      em.n_mass_uu_integrals = kt.n_mass_uu_integrals;
      result[static_cast<std::size_t>(e)] = std::move(em);
    }
  };

  if (threads <= 1 || n_elems <= 1) {
    for (int e = 0; e < n_elems; ++e) fill_one(e);
    return result;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  const int n_threads = std::min(threads, n_elems);
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int e = next.fetch_add(1);
        if (e >= n_elems) return;
        try {
          fill_one(e);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return result;
}

GlobalSystem assemble_system(const Mesh& mesh, const Orders& orders, Backend backend,
                             int nq, int threads) {
  int geom_order = 1;
  for (const CurvedQuadElement& e : mesh.elements) geom_order = std::max(geom_order, e.order);
  if (nq <= 0) nq = default_quad_points(orders, geom_order);
  const DofMap dof_map = build_connectivity(mesh, orders.M, orders.N);
  std::vector<ElementMatrices> elems = fill_elements(mesh, orders, backend, nq, threads);
  for (ElementMatrices& em : elems) apply_conforming_transform(em);
  return assemble_global(mesh, dof_map, elems);
}

}  // namespace chebfem
