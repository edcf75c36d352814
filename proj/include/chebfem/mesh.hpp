#ifndef CHEBFEM_MESH_HPP
#define CHEBFEM_MESH_HPP

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chebfem/expr.hpp"

namespace chebfem {

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Element with non-positive Jacobian or otherwise invalid geometry.
class GeometryError : public MeshError {
 public:
  using MeshError::MeshError;
};

struct Node2 {
  double x = 0.0;
  double y = 0.0;
};

/// Curved quadrilateral with a Lagrangian isoparametric map of geometric
/// order `order`; node ids cover the (order+1)^2 reference grid in
/// lexicographic order with u fastest.
struct CurvedQuadElement {
  int order = 1;
  std::vector<int> nodes;
};

/// Local edges: 0: v=-1, 1: u=+1, 2: v=+1, 3: u=-1.
struct EdgeRef {
  int element = 0;
  int local_edge = 0;
};

struct Materials {
  ExprAst eps_r;
  ExprAst mu_r;
  std::string eps_r_text = "1";
  std::string mu_r_text = "1";
};

struct Mesh {
  std::vector<Node2> nodes;
  std::vector<CurvedQuadElement> elements;
  std::vector<EdgeRef> boundary_edges;
  Materials materials;
};

/// Geometry map sample: position, partials and Jacobian determinant
/// J = x_u y_v - x_v y_u at one reference point.
struct MapSample {
  double x, y;
  double x_u, x_v, y_u, y_v;
  double J;
};

/// 1-D Lagrange basis on the equispaced reference grid of p+1 points.
/// values/derivs are filled with L_i(u) and L_i'(u), i = 0..p.
void lagrange_basis(int p, double u, std::span<double> values, std::span<double> derivs);

MapSample map_and_jacobian(const CurvedQuadElement& elem, std::span<const Node2> nodes,
                           double u, double v);

/// Endpoint node ids of a local edge, in the direction of increasing edge
/// parameter.
std::array<int, 2> edge_endpoints(const CurvedQuadElement& elem, int local_edge);

/// Geometry node ids along a local edge, in the direction of increasing edge
/// parameter (order+1 entries).
std::vector<int> edge_nodes(const CurvedQuadElement& elem, int local_edge);

Mesh load_mesh(const std::string& json_text);
Mesh load_mesh_file(const std::string& path);
std::string mesh_to_json(const Mesh& mesh);
void save_mesh_file(const Mesh& mesh, const std::string& path);

/// Checks node references, Jacobian positivity, shared-edge geometry
/// compatibility and the boundary edge list. Throws MeshError/GeometryError
/// naming the offending element.
void validate_mesh(const Mesh& mesh);

/// Curves and materials of the transfinite generator. The domain is bounded
/// by x=-1 (left), y=-1 (bottom), the curve y=top(x) above and x=right(y) on
/// the right; interior nodes come from Coons-patch blending.
struct TransfiniteSpec {
  std::string top = "-0.2*(x^2-1)^2+1";
  std::string right = "0.2*(y^2-1)^2+1";
  std::string eps_r = "2*exp(x+y+2)";
  std::string mu_r = "1";
};

Mesh generate_transfinite_mesh(int nx, int ny, int p, const TransfiniteSpec& spec = {});

/// The curved benchmark domain: nx x ny elements of geometric order p with
/// eps_r = 2exp(x+y+2) and mu_r = 1.
inline Mesh generate_benchmark_domain(int nx, int ny, int p) {
  return generate_transfinite_mesh(nx, ny, p);
}

}  // namespace chebfem

#endif
