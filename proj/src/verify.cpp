#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "chebfem/bench.hpp"
#include "chebfem/chebyshev.hpp"
#include "chebfem/eigensolve.hpp"
#include "chebfem/quadrature.hpp"

namespace chebfem {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Mesh random_single_element_mesh(std::mt19937& rng, int geometric_order, double amplitude) {
  const int p = geometric_order;
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);

  // materials: positive smooth expressions over the perturbed element
  const double a = 1.0 + std::fabs(coeff(rng)) * 2.0;
  const double b = 0.2 * coeff(rng);
  const double c = 0.2 * coeff(rng);
  const double d = 0.2 + std::fabs(coeff(rng)) * 0.8;
  const double e = 0.4 * coeff(rng);
  const double f = 0.4 * coeff(rng);
  const double g = 0.8 + std::fabs(coeff(rng)) * 0.7;
  const double h = 0.2 * coeff(rng);
  char eps_buf[200];
  char mu_buf[120];
  std::snprintf(eps_buf, sizeof eps_buf, "%.17g+%.17g*x+%.17g*y+%.17g*exp(%.17g*x+%.17g*y)", a, b,
                c, d, e, f);
  std::snprintf(mu_buf, sizeof mu_buf, "%.17g+%.17g*x*y", g, h);

  for (double amp = amplitude;; amp *= 0.5) {
    Mesh mesh;
    CurvedQuadElement elem;
    elem.order = p;
    for (int j = 0; j <= p; ++j) {
      for (int i = 0; i <= p; ++i) {
        const double u = -1.0 + 2.0 * i / p;
        const double v = -1.0 + 2.0 * j / p;
        mesh.nodes.push_back({u + amp * coeff(rng), v + amp * coeff(rng)});
        elem.nodes.push_back(i + (p + 1) * j);
      }
    }
    mesh.elements.push_back(elem);
    for (int le = 0; le < 4; ++le) mesh.boundary_edges.push_back({0, le});
    mesh.materials.eps_r_text = eps_buf;
    mesh.materials.mu_r_text = mu_buf;
    mesh.materials.eps_r = parse_expr(mesh.materials.eps_r_text);
    mesh.materials.mu_r = parse_expr(mesh.materials.mu_r_text);
    try {
      validate_mesh(mesh);
      // stricter than the validation rule: assembly samples finer grids
      const QuadRule1D dense = gauss_legendre(24);
      for (double v : dense.nodes) {
        for (double u : dense.nodes) {
          const MapSample s = map_and_jacobian(mesh.elements[0], mesh.nodes, u, v);
          if (!(s.J > 0.05)) throw GeometryError("folded");
        }
      }
      return mesh;
    } catch (const GeometryError&) {
      // perturbation folded the element; retry smaller
    }
  }
}

namespace {

bool block_close(const Mat& a, const Mat& b, double rtol, const char* name,
                 std::string* message) {
  const double scale = std::max(max_abs(a), max_abs(b));
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      const double x = a(i, j);
      const double y = b(i, j);
      const double diff = std::fabs(x - y);
      if (diff <= rtol * std::max(std::fabs(x), std::fabs(y))) continue;
      if (diff <= 1e-12 * scale) continue;
      if (message) {
        *message = std::string(name) + "(" + std::to_string(i) + "," + std::to_string(j) +
                   "): " + fmt(x) + " vs " + fmt(y) + " (diff " + fmt(diff) + ")";
      }
      return false;
    }
  }
  return true;
}

}  // namespace

bool element_matrices_close(const ElementMatrices& a, const ElementMatrices& b, double rtol,
                            std::string* message) {
  return block_close(a.Suu, b.Suu, rtol, "Suu", message) &&
         block_close(a.Suv, b.Suv, rtol, "Suv", message) &&
         block_close(a.Svu, b.Svu, rtol, "Svu", message) &&
         block_close(a.Svv, b.Svv, rtol, "Svv", message) &&
         block_close(a.Muu, b.Muu, rtol, "Muu", message) &&
         block_close(a.Muv, b.Muv, rtol, "Muv", message) &&
         block_close(a.Mvu, b.Mvu, rtol, "Mvu", message) &&
         block_close(a.Mvv, b.Mvv, rtol, "Mvv", message);
}

namespace {

bool check_identities(std::mt19937& rng, std::string& detail) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const PolyFamily fams[2] = {PolyFamily::T, PolyFamily::U};
  std::vector<double> points;
  points.push_back(-1.0);
  points.push_back(1.0);
  for (int i = 0; i < 98; ++i) points.push_back(unit(rng));
  for (PolyFamily fa : fams) {
    for (PolyFamily fb : fams) {
      for (int a = 0; a <= 20; ++a) {
        for (int b = 0; b <= 20; ++b) {
          const SumExpansion e = product_to_sum(fa, a, fb, b);
          if (e.size() > 2) {
            detail = "expansion has more than two terms";
            return false;
          }
          for (double u : points) {
            const double lhs = eval_poly(fa, a, u) * eval_poly(fb, b, u);
            const double rhs = e.eval(u);
            if (std::fabs(lhs - rhs) > 1e-12) {
              detail = "pointwise mismatch " + fmt(lhs) + " vs " + fmt(rhs) + " for " +
                       family_name(fa) + std::to_string(a) + "*" + family_name(fb) +
                       std::to_string(b) + " at u=" + fmt(u);
              return false;
            }
          }
        }
      }
    }
  }
  // reconstruction of the nonsingular family: 2(1-u^2) Tns_n + parity = T_n
  for (int n = 0; n <= 40; ++n) {
    for (int k = 0; k < 50; ++k) {
      const double u = 0.99 * unit(rng);
      const double parity = (n % 2 == 0) ? 1.0 : u;
      const double lhs = 2.0 * (1.0 - u * u) * eval_Tns(n, u) + parity;
      if (std::fabs(lhs - eval_T(n, u)) > 1e-10) {
        detail = "Tns reconstruction failed at n=" + std::to_string(n) + " u=" + fmt(u);
        return false;
      }
    }
  }
  return true;
}

bool check_quadrature(std::string& detail) {
  for (int n = 1; n <= 12; ++n) {
    const QuadRule1D rule = gauss_legendre(n);
    double wsum = 0.0;
    for (double w : rule.weights) wsum += w;
    if (std::fabs(wsum - 2.0) > 1e-13) {
      detail = "weights of n=" + std::to_string(n) + " sum to " + fmt(wsum);
      return false;
    }
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += rule.weights[static_cast<std::size_t>(i)] *
               std::pow(rule.nodes[static_cast<std::size_t>(i)], deg);
      }
      const double exact = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1);
      if (std::fabs(acc - exact) > 1e-12) {
        detail = "rule n=" + std::to_string(n) + " misses degree " + std::to_string(deg);
        return false;
      }
    }
  }
  return true;
}

bool check_backend_equivalence(std::mt19937& rng, std::string& detail) {
  std::uniform_int_distribution<int> order_dist(1, 4);
  for (int trial = 0; trial < 10; ++trial) {
    const Mesh mesh = random_single_element_mesh(rng, order_dist(rng));
    for (int mn = 1; mn <= 6; ++mn) {
      const Orders orders{mn, mn};
      const int nq = default_quad_points(orders, mesh.elements[0].order);
      const ElementMatrices direct = assemble_direct_element(mesh, 0, orders, nq);
      const ElementMatrices p2s =
          assemble_p2s_element(compute_kernel_tables(mesh, 0, orders, nq), orders);
      std::string msg;
      if (!element_matrices_close(direct, p2s, 1e-10, &msg)) {
        detail = "trial " + std::to_string(trial) + " M=N=" + std::to_string(mn) + ": " + msg;
        return false;
      }
    }
  }
  return true;
}

bool check_analytic_cavity(std::string& detail) {
  TransfiniteSpec square;
  square.top = "1";
  square.right = "1";
  square.eps_r = "1";
  square.mu_r = "1";
  const Mesh mesh = generate_transfinite_mesh(1, 1, 1, square);
  const GlobalSystem sys = assemble_system(mesh, Orders{8, 8}, Backend::p2s);
  const Spectrum spec = spectrum(sys, 1e-8);
  const double expected = 0.25 * kPi * kPi;
  if (spec.nullspace_count != 49) {
    detail = "nullspace count " + std::to_string(spec.nullspace_count) + ", expected 49";
    return false;
  }
  if (spec.eigenvalues.size() < 2) {
    detail = "fewer than two retained eigenvalues";
    return false;
  }
  const double rel1 = std::fabs(spec.eigenvalues[0] - expected) / expected;
  const double rel2 = std::fabs(spec.eigenvalues[1] - expected) / expected;
  if (rel1 > 1e-6 || rel2 > 1e-6) {
    detail = "lowest pair " + fmt(spec.eigenvalues[0]) + ", " + fmt(spec.eigenvalues[1]) +
             " vs (pi/2)^2 = " + fmt(expected);
    return false;
  }
  return true;
}

bool check_count_model(std::string& detail) {
  for (int mn : {6, 8, 10}) {
    const double ratio = static_cast<double>(integral_count(mn, mn, Backend::direct)) /
                         static_cast<double>(integral_count(mn, mn, Backend::p2s));
    const double model = static_cast<double>(mn) * mn / 16.0;
    if (std::fabs(ratio - model) > 0.2 * model) {
      detail = "M=N=" + std::to_string(mn) + ": ratio " + fmt(ratio) + " vs D/16 = " + fmt(model);
      return false;
    }
  }
  return true;
}

}  // namespace

bool run_verification(unsigned seed, std::ostream& out) {
  std::mt19937 rng(seed);
  bool all_ok = true;
  std::string detail;

  const auto report = [&](const char* name, bool ok) {
    out << (ok ? "PASS" : "FAIL") << "  " << name;
    if (!ok && !detail.empty()) out << "  [" << detail << "]";
    out << "\n";
    detail.clear();
    all_ok = all_ok && ok;
  };

  report("product-to-sum identities exact", check_identities(rng, detail));
  report("gauss-legendre exactness", check_quadrature(detail));
  report("backend equivalence on random curved elements", check_backend_equivalence(rng, detail));
  report("analytic square cavity", check_analytic_cavity(detail));
  report("integral count model D/16", check_count_model(detail));
  return all_ok;
}

}  // namespace chebfem
