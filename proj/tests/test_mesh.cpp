#include "chebfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chebfem/quadrature.hpp"
#include "doctest.h"

using namespace chebfem;

namespace {

// Two bilinear elements covering [-1,3]x[-1,1]; element B rotated 180 deg so
// the shared edge x=1 is traversed in opposite directions.
Mesh two_element_mesh(bool flipped) {
  Mesh mesh;
  mesh.nodes = {{-1, -1}, {1, -1}, {3, -1}, {-1, 1}, {1, 1}, {3, 1}};
  CurvedQuadElement a;
  a.order = 1;
  a.nodes = {0, 1, 3, 4};
  CurvedQuadElement b;
  b.order = 1;
  b.nodes = flipped ? std::vector<int>{5, 4, 2, 1} : std::vector<int>{1, 2, 4, 5};
  mesh.elements = {a, b};
  if (flipped) {
    mesh.boundary_edges = {{0, 0}, {0, 2}, {0, 3}, {1, 0}, {1, 2}, {1, 3}};
  } else {
    mesh.boundary_edges = {{0, 0}, {0, 2}, {0, 3}, {1, 0}, {1, 1}, {1, 2}};
  }
  mesh.materials.eps_r_text = "1";
  mesh.materials.mu_r_text = "1";
  mesh.materials.eps_r = parse_expr("1");
  mesh.materials.mu_r = parse_expr("1");
  return mesh;
}

}  // namespace

TEST_CASE("lagrange basis: partition of unity and nodal property") {
  std::mt19937 rng(19);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int p = 1; p <= 6; ++p) {
    std::vector<double> val(p + 1), der(p + 1);
    for (int trial = 0; trial < 100; ++trial) {
      const double u = unit(rng);
      lagrange_basis(p, u, val, der);
      double vsum = 0.0, dsum = 0.0;
      for (int i = 0; i <= p; ++i) {
        vsum += val[i];
        dsum += der[i];
      }
      CHECK(std::fabs(vsum - 1.0) <= 1e-13);
      CHECK(std::fabs(dsum) <= 1e-12);
    }
    for (int j = 0; j <= p; ++j) {
      lagrange_basis(p, -1.0 + 2.0 * j / p, val, der);
      for (int i = 0; i <= p; ++i) {
        CHECK(val[i] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("identity and affine element maps") {
  // identity: nodes at the reference grid positions
  for (int p : {1, 3}) {
    Mesh mesh;
    CurvedQuadElement elem;
    elem.order = p;
    for (int j = 0; j <= p; ++j) {
      for (int i = 0; i <= p; ++i) {
        mesh.nodes.push_back({-1.0 + 2.0 * i / p, -1.0 + 2.0 * j / p});
        elem.nodes.push_back(i + (p + 1) * j);
      }
    }
    const QuadRule1D rule = gauss_legendre(7);
    for (double v : rule.nodes) {
      for (double u : rule.nodes) {
        const MapSample s = map_and_jacobian(elem, mesh.nodes, u, v);
        CHECK(std::fabs(s.x - u) <= 1e-14);
        CHECK(std::fabs(s.y - v) <= 1e-14);
        CHECK(std::fabs(s.x_u - 1.0) <= 1e-13);
        CHECK(std::fabs(s.x_v) <= 1e-13);
        CHECK(std::fabs(s.y_u) <= 1e-13);
        CHECK(std::fabs(s.y_v - 1.0) <= 1e-13);
        CHECK(std::fabs(s.J - 1.0) <= 1e-13);
      }
    }
  }

  // affine x = 2u, y = 3v
  Mesh mesh;
  mesh.nodes = {{-2, -3}, {2, -3}, {-2, 3}, {2, 3}};
  CurvedQuadElement elem;
  elem.order = 1;
  elem.nodes = {0, 1, 2, 3};
  const MapSample s = map_and_jacobian(elem, mesh.nodes, 0.3, -0.7);
  CHECK(s.x == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(s.y == doctest::Approx(-2.1).epsilon(1e-14));
  CHECK(s.x_u == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s.y_v == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(s.J == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("analytic derivatives match central finite differences on a curved element") {
  const Mesh mesh = generate_benchmark_domain(4, 4, 4);
  const CurvedQuadElement& elem = mesh.elements[15];  // top-right, both edges curved
  const double h = 1e-6;
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> unit(-0.99, 0.99);
  for (int trial = 0; trial < 30; ++trial) {
    const double u = unit(rng);
    const double v = unit(rng);
    const MapSample s = map_and_jacobian(elem, mesh.nodes, u, v);
    const MapSample up = map_and_jacobian(elem, mesh.nodes, u + h, v);
    const MapSample um = map_and_jacobian(elem, mesh.nodes, u - h, v);
    const MapSample vp = map_and_jacobian(elem, mesh.nodes, u, v + h);
    const MapSample vm = map_and_jacobian(elem, mesh.nodes, u, v - h);
    CHECK(s.x_u == doctest::Approx((up.x - um.x) / (2 * h)).epsilon(1e-6));
    CHECK(s.y_u == doctest::Approx((up.y - um.y) / (2 * h)).epsilon(1e-6));
    CHECK(s.x_v == doctest::Approx((vp.x - vm.x) / (2 * h)).epsilon(1e-6));
    CHECK(s.y_v == doctest::Approx((vp.y - vm.y) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("generated benchmark domain") {
  const Mesh mesh = generate_benchmark_domain(4, 4, 4);
  CHECK(mesh.elements.size() == 16);
  CHECK(mesh.nodes.size() == 17 * 17);
  for (const CurvedQuadElement& e : mesh.elements) {
    CHECK(e.order == 4);
    CHECK(e.nodes.size() == 25);
  }
  CHECK(mesh.boundary_edges.size() == 16);

  // corners: f(1) = g(1) = 1 so the top-right corner is (1,1)
  const Node2 bl = mesh.nodes.front();
  const Node2 tr = mesh.nodes.back();
  CHECK(bl.x == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(bl.y == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(tr.x == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(tr.y == doctest::Approx(1.0).epsilon(1e-13));

  // top boundary nodes sit on y = -0.2(x^2-1)^2 + 1, right ones on x = g(y)
  for (int i = 0; i < 17; ++i) {
    const Node2 n = mesh.nodes[static_cast<std::size_t>(16 * 17 + i)];
    const double f = -0.2 * (n.x * n.x - 1) * (n.x * n.x - 1) + 1;
    CHECK(n.y == doctest::Approx(f).epsilon(1e-12));
    const Node2 r = mesh.nodes[static_cast<std::size_t>(16 + 17 * i)];
    const double g = 0.2 * (r.y * r.y - 1) * (r.y * r.y - 1) + 1;
    CHECK(r.x == doctest::Approx(g).epsilon(1e-12));
  }

  // shared edges reference identical geometry nodes (by id, hence bit-exact)
  for (int ex = 0; ex < 3; ++ex) {
    const std::vector<int> right = edge_nodes(mesh.elements[static_cast<std::size_t>(ex)], 1);
    const std::vector<int> left = edge_nodes(mesh.elements[static_cast<std::size_t>(ex + 1)], 3);
    CHECK(right == left);
  }
  CHECK(mesh.materials.eps_r_text == "2*exp(x+y+2)");
  CHECK(mesh.materials.mu_r_text == "1");
}

TEST_CASE("unit-square degenerate case of the generator") {
  TransfiniteSpec spec;
  spec.top = "1";
  spec.right = "1";
  spec.eps_r = "1";
  spec.mu_r = "1";
  const Mesh mesh = generate_transfinite_mesh(1, 1, 1, spec);
  REQUIRE(mesh.nodes.size() == 4);
  CHECK(mesh.nodes[0].x == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(mesh.nodes[3].x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(mesh.nodes[3].y == doctest::Approx(1.0).epsilon(1e-15));
  const MapSample s = map_and_jacobian(mesh.elements[0], mesh.nodes, 0.25, -0.5);
  CHECK(s.J == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("mesh file round-trip and golden single-element file") {
  const Mesh mesh = generate_benchmark_domain(2, 2, 3);
  const Mesh loaded = load_mesh(mesh_to_json(mesh));
  REQUIRE(loaded.nodes.size() == mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    CHECK(loaded.nodes[i].x == mesh.nodes[i].x);
    CHECK(loaded.nodes[i].y == mesh.nodes[i].y);
  }
  REQUIRE(loaded.elements.size() == mesh.elements.size());
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    CHECK(loaded.elements[e].nodes == mesh.elements[e].nodes);
  }

  const char* golden = R"({
    "version": 1,
    "nodes": [[-1,-1],[1,-1],[-1,1],[1,1]],
    "elements": [{"order": 1, "nodes": [0,1,2,3]}],
    "boundary_edges": [[0,0],[0,1],[0,2],[0,3]],
    "materials": {"eps_r": "1", "mu_r": "1"}
  })";
  const Mesh unit = load_mesh(golden);
  REQUIRE(unit.elements.size() == 1);
  const MapSample s = map_and_jacobian(unit.elements[0], unit.nodes, -0.3, 0.8);
  CHECK(s.J == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("schema and geometry violations are reported with the element index") {
  // dangling node reference
  const char* dangling = R"({
    "version": 1,
    "nodes": [[-1,-1],[1,-1],[-1,1]],
    "elements": [{"order": 1, "nodes": [0,1,2,7]}],
    "boundary_edges": [[0,0],[0,1],[0,2],[0,3]],
    "materials": {"eps_r": "1", "mu_r": "1"}
  })";
  try {
    load_mesh(dangling);
    FAIL("expected MeshError");
  } catch (const MeshError& e) {
    CHECK(std::string(e.what()).find("element 0") != std::string::npos);
  }

  // two corners swapped: negative Jacobian
  const char* folded = R"({
    "version": 1,
    "nodes": [[-1,-1],[1,-1],[-1,1],[1,1]],
    "elements": [{"order": 1, "nodes": [1,0,2,3]}],
    "boundary_edges": [[0,0],[0,1],[0,2],[0,3]],
    "materials": {"eps_r": "1", "mu_r": "1"}
  })";
  CHECK_THROWS_AS(load_mesh(folded), GeometryError);

  CHECK_THROWS_AS(load_mesh("not json at all"), MeshError);
  CHECK_THROWS_AS(load_mesh(R"({"version": 2})"), MeshError);

  // boundary list must be exactly the single-incidence edges
  Mesh bad = two_element_mesh(false);
  bad.boundary_edges.pop_back();
  CHECK_THROWS_AS(validate_mesh(bad), MeshError);
}

TEST_CASE("a flipped shared edge loads cleanly") {
  const Mesh flipped = two_element_mesh(true);
  CHECK_NOTHROW(validate_mesh(flipped));
  const Mesh reload = load_mesh(mesh_to_json(flipped));
  CHECK(reload.elements[1].nodes == flipped.elements[1].nodes);

  // the shared edge is reversed between the two elements
  const std::vector<int> a = edge_nodes(flipped.elements[0], 1);
  std::vector<int> b = edge_nodes(flipped.elements[1], 1);
  std::reverse(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("materials with bad expressions are rejected") {
  const char* bad_expr = R"({
    "version": 1,
    "nodes": [[-1,-1],[1,-1],[-1,1],[1,1]],
    "elements": [{"order": 1, "nodes": [0,1,2,3]}],
    "boundary_edges": [[0,0],[0,1],[0,2],[0,3]],
    "materials": {"eps_r": "2*exp(", "mu_r": "1"}
  })";
  CHECK_THROWS_AS(load_mesh(bad_expr), MeshError);
}
