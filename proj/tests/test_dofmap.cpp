#include "chebfem/dof_map.hpp"

#include <cmath>
#include <map>
#include <random>

#include "chebfem/chebyshev.hpp"
#include "chebfem/eigensolve.hpp"
#include "doctest.h"

using namespace chebfem;

namespace {

Materials unit_materials() {
  Materials m;
  m.eps_r_text = "1";
  m.mu_r_text = "1";
  m.eps_r = parse_expr("1");
  m.mu_r = parse_expr("1");
  return m;
}

// Two bilinear elements covering [-1,3]x[-1,1].
// orient = 0: aligned; 1: B rotated 180 deg; 2: B rotated 90 deg.
Mesh two_element_mesh(int orient) {
  Mesh mesh;
  mesh.nodes = {{-1, -1}, {1, -1}, {3, -1}, {-1, 1}, {1, 1}, {3, 1}};
  CurvedQuadElement a;
  a.order = 1;
  a.nodes = {0, 1, 3, 4};
  CurvedQuadElement b;
  b.order = 1;
  switch (orient) {
    case 0: b.nodes = {1, 2, 4, 5}; break;
    case 1: b.nodes = {5, 4, 2, 1}; break;
    default: b.nodes = {2, 5, 1, 4}; break;
  }
  mesh.elements = {a, b};
  switch (orient) {
    case 0: mesh.boundary_edges = {{0, 0}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2}}; break;
    case 1: mesh.boundary_edges = {{0, 0}, {0, 2}, {0, 3}, {1, 0}, {1, 2}, {1, 3}}; break;
    default: mesh.boundary_edges = {{0, 0}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 3}}; break;
  }
  mesh.materials = unit_materials();
  return mesh;
}

Mesh single_element_mesh() {
  Mesh mesh;
  mesh.nodes = {{-1, -1}, {1, -1}, {-1, 1}, {1, 1}};
  CurvedQuadElement e;
  e.order = 1;
  e.nodes = {0, 1, 2, 3};
  mesh.elements = {e};
  mesh.boundary_edges = {{0, 0}, {0, 1}, {0, 2}, {0, 3}};
  mesh.materials = unit_materials();
  return mesh;
}

// Free-DOF counting oracle: interior modes per element plus the tangential
// modes of each interior (non-PEC) edge.
int expected_free_dofs(const Mesh& mesh, const DofMap& map) {
  const int M = map.M;
  const int N = map.N;
  int count = static_cast<int>(mesh.elements.size()) * (M * (N - 1) + (M - 1) * N);
  std::map<std::pair<int, int>, int> edge_count;
  std::map<std::pair<int, int>, bool> edge_utype;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    for (int le = 0; le < 4; ++le) {
      const std::array<int, 2> ends = edge_endpoints(mesh.elements[e], le);
      const auto key = std::make_pair(std::min(ends[0], ends[1]), std::max(ends[0], ends[1]));
      ++edge_count[key];
      edge_utype[key] = (le == 0 || le == 2);
    }
  }
  for (const auto& [key, n] : edge_count) {
    if (n == 2) count += edge_utype[key] ? M : N;
  }
  return count;
}

// Tangential trace along a shared edge, pulled back to the canonical edge
// parameter as a 1-form coefficient.
double edge_trace(const Mesh& mesh, const DofMap& map, const std::vector<double>& x_global,
                  int elem, int local_edge, double t) {
  const int M = map.M;
  const int N = map.N;
  const Orders orders{M, N};
  const std::array<int, 2> ends =
      edge_endpoints(mesh.elements[static_cast<std::size_t>(elem)], local_edge);
  const double dir = (ends[0] < ends[1]) ? 1.0 : -1.0;
  const double s = dir * t;
  double sum = 0.0;
  const int modes = (local_edge == 0 || local_edge == 2) ? M : N;
  for (int m = 0; m < modes; ++m) {
    int local = 0;
    switch (local_edge) {
      case 0: local = m * (N + 1) + 0; break;
      case 2: local = m * (N + 1) + 1; break;
      case 3: local = orders.n_eu() + 0 * N + m; break;
      default: local = orders.n_eu() + 1 * N + m; break;
    }
    const DofMap::LocalDof dof =
        map.element_dofs[static_cast<std::size_t>(elem)][static_cast<std::size_t>(local)];
    sum += dof.sign * x_global[static_cast<std::size_t>(dof.global)] * eval_U(m, s);
  }
  return dir * sum;
}

}  // namespace

TEST_CASE("single PEC element free DOF count") {
  const Mesh mesh = single_element_mesh();
  const DofMap map = build_connectivity(mesh, 2, 2);
  CHECK(map.n_free == 4);  // M(N-1) + (M-1)N
  CHECK(map.n_global == 4 + 4 * 2);
  CHECK(static_cast<int>(map.constrained.size()) == 8);
  for (int g : map.constrained) CHECK(map.is_constrained(g));

  const DofMap map53 = build_connectivity(mesh, 5, 3);
  CHECK(map53.n_free == 5 * 2 + 4 * 3);
}

TEST_CASE("two-element free DOF count matches the counting oracle") {
  for (int orient : {0, 1}) {
    const Mesh mesh = two_element_mesh(orient);
    const DofMap map = build_connectivity(mesh, 2, 2);
    CHECK(map.n_free == expected_free_dofs(mesh, map));
    CHECK(map.n_free == 10);  // 2*4 interior + N modes on the shared edge
    CHECK(static_cast<int>(map.constrained.size()) == 12);
    CHECK(map.n_global == 22);
  }
}

TEST_CASE("every global DOF is referenced by at least one local DOF") {
  for (int orient : {0, 1, 2}) {
    const Mesh mesh = two_element_mesh(orient);
    const DofMap map = build_connectivity(mesh, 3, 3);
    std::vector<int> refs(static_cast<std::size_t>(map.n_global), 0);
    for (const auto& dofs : map.element_dofs) {
      for (const DofMap::LocalDof& d : dofs) ++refs[static_cast<std::size_t>(d.global)];
    }
    for (int r : refs) CHECK(r >= 1);
  }
}

TEST_CASE("shared tangential traces are identical from both sides") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int orient : {0, 1, 2}) {
    for (int mn : {2, 4}) {
      const Mesh mesh = two_element_mesh(orient);
      const DofMap map = build_connectivity(mesh, mn, mn);
      std::vector<double> x(static_cast<std::size_t>(map.n_global));
      for (double& v : x) v = unit(rng);

      // the shared edge joins A's local edge 1 with B's edge {3, 1, 2}
      const int b_edge = (orient == 0) ? 3 : (orient == 1 ? 1 : 2);
      for (int k = 0; k < 21; ++k) {
        const double t = -1.0 + 0.1 * k;
        const double from_a = edge_trace(mesh, map, x, 0, 1, t);
        const double from_b = edge_trace(mesh, map, x, 1, b_edge, t);
        CHECK(from_a == doctest::Approx(from_b).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("PEC constraints sit on boundary edges only") {
  const Mesh mesh = two_element_mesh(0);
  const DofMap map = build_connectivity(mesh, 3, 3);
  const Orders orders{3, 3};
  // interior-edge modes must remain free: A's u=+1 traces
  for (int n = 0; n < 3; ++n) {
    const int local = orders.n_eu() + 1 * 3 + n;
    const DofMap::LocalDof d = map.element_dofs[0][static_cast<std::size_t>(local)];
    CHECK_FALSE(map.is_constrained(d.global));
  }
  // every boundary-edge mode is constrained: A's v=-1 traces
  for (int m = 0; m < 3; ++m) {
    const int local = m * 4 + 0;
    const DofMap::LocalDof d = map.element_dofs[0][static_cast<std::size_t>(local)];
    CHECK(map.is_constrained(d.global));
  }
}

TEST_CASE("rotated neighbors need matching tangential mode counts") {
  const Mesh mesh = two_element_mesh(2);
  CHECK_THROWS_AS(build_connectivity(mesh, 2, 3), MeshError);
  CHECK_NOTHROW(build_connectivity(mesh, 3, 3));
}

TEST_CASE("hanging nodes are rejected") {
  Mesh mesh = two_element_mesh(0);
  mesh.nodes.push_back({2, -1});
  mesh.nodes.push_back({2, 1});
  CurvedQuadElement c;
  c.order = 1;
  c.nodes = {1, 6, 4, 7};  // a third incidence on edge (1,4)
  mesh.elements.push_back(c);
  CHECK_THROWS_AS(build_connectivity(mesh, 2, 2), MeshError);
}

TEST_CASE("element orientation does not change the spectrum") {
  // PEC rectangle [-1,3]x[-1,1]: k0^2 = (i pi/4)^2 + (j pi/2)^2
  const double pi = 3.14159265358979323846;
  const std::vector<double> analytic = {pi * pi / 16.0, 4 * pi * pi / 16.0, 4 * pi * pi / 16.0};

  std::vector<std::vector<double>> spectra;
  for (int orient : {0, 1, 2}) {
    const Mesh mesh = two_element_mesh(orient);
    const GlobalSystem sys = assemble_system(mesh, Orders{8, 8}, Backend::p2s);
    const Spectrum spec = spectrum(sys, 1e-8);
    REQUIRE(spec.eigenvalues.size() >= 3);
    spectra.push_back({spec.eigenvalues[0], spec.eigenvalues[1], spec.eigenvalues[2]});
  }
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(spectra[1][i] == doctest::Approx(spectra[0][i]).epsilon(1e-10));
    CHECK(spectra[2][i] == doctest::Approx(spectra[0][i]).epsilon(1e-10));
    CHECK(spectra[0][i] == doctest::Approx(analytic[i]).epsilon(1e-6));
  }
}
