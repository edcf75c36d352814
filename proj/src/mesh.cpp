#include "chebfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "chebfem/quadrature.hpp"
#include "json.hpp"

namespace chebfem {

void lagrange_basis(int p, double u, std::span<double> values, std::span<double> derivs) {
  const int n = p + 1;
  for (int i = 0; i < n; ++i) {
    const double ui = -1.0 + 2.0 * i / p;
    double num = 1.0;
    double den = 1.0;
    double dsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double uj = -1.0 + 2.0 * j / p;
      num *= (u - uj);
      den *= (ui - uj);
      // derivative: sum over k of prod_{j != i,k} (u - uj) / prod (ui - uj)
      double term = 1.0;
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        term *= (u - (-1.0 + 2.0 * k / p));
      }
      dsum += term;
    }
    values[static_cast<std::size_t>(i)] = (p == 0) ? 1.0 : num / den;
    derivs[static_cast<std::size_t>(i)] = (p == 0) ? 0.0 : dsum / den;
  }
}

MapSample map_and_jacobian(const CurvedQuadElement& elem, std::span<const Node2> nodes,
                           double u, double v) {
  const int p = elem.order;
  const int n = p + 1;
  std::vector<double> lu(static_cast<std::size_t>(n)), dlu(static_cast<std::size_t>(n));
  std::vector<double> lv(static_cast<std::size_t>(n)), dlv(static_cast<std::size_t>(n));
  lagrange_basis(p, u, lu, dlu);
  lagrange_basis(p, v, lv, dlv);
  MapSample s{0, 0, 0, 0, 0, 0, 0};
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      const Node2& node = nodes[static_cast<std::size_t>(elem.nodes[static_cast<std::size_t>(a + n * b)])];
      const double w = lu[static_cast<std::size_t>(a)] * lv[static_cast<std::size_t>(b)];
      const double wu = dlu[static_cast<std::size_t>(a)] * lv[static_cast<std::size_t>(b)];
      const double wv = lu[static_cast<std::size_t>(a)] * dlv[static_cast<std::size_t>(b)];
      s.x += w * node.x;
      s.y += w * node.y;
      s.x_u += wu * node.x;
      s.y_u += wu * node.y;
      s.x_v += wv * node.x;
      s.y_v += wv * node.y;
    }
  }
  s.J = s.x_u * s.y_v - s.x_v * s.y_u;
  return s;
}

std::array<int, 2> edge_endpoints(const CurvedQuadElement& elem, int local_edge) {
  const int p = elem.order;
  const int n = p + 1;
  const int c00 = elem.nodes[0];
  const int c10 = elem.nodes[static_cast<std::size_t>(p)];
  const int c01 = elem.nodes[static_cast<std::size_t>(n * p)];
  const int c11 = elem.nodes[static_cast<std::size_t>(n * n - 1)];
  switch (local_edge) {
    case 0: return {c00, c10};
    case 1: return {c10, c11};
    case 2: return {c01, c11};
    case 3: return {c00, c01};
    default: throw MeshError("bad local edge " + std::to_string(local_edge));
  }
}

std::vector<int> edge_nodes(const CurvedQuadElement& elem, int local_edge) {
  const int p = elem.order;
  const int n = p + 1;
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int k = 0; k <= p; ++k) {
    int idx = 0;
    switch (local_edge) {
      case 0: idx = k; break;               // v=-1, increasing u
      case 1: idx = p + n * k; break;       // u=+1, increasing v
      case 2: idx = n * p + k; break;       // v=+1, increasing u
      case 3: idx = n * k; break;           // u=-1, increasing v
      default: throw MeshError("bad local edge " + std::to_string(local_edge));
    }
    ids[static_cast<std::size_t>(k)] = elem.nodes[static_cast<std::size_t>(idx)];
  }
  return ids;
}

namespace {

using EdgeKey = std::pair<int, int>;

EdgeKey make_edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

void validate_mesh(const Mesh& mesh) {
  const int n_nodes = static_cast<int>(mesh.nodes.size());
  std::map<EdgeKey, std::vector<EdgeRef>> edges;
  for (int e = 0; e < static_cast<int>(mesh.elements.size()); ++e) {
    const CurvedQuadElement& elem = mesh.elements[static_cast<std::size_t>(e)];
    const int p = elem.order;
    if (p < 1) throw MeshError("element " + std::to_string(e) + ": order must be >= 1");
    const std::size_t expect = static_cast<std::size_t>((p + 1) * (p + 1));
    if (elem.nodes.size() != expect) {
      throw MeshError("element " + std::to_string(e) + ": expected " + std::to_string(expect) +
                      " nodes, got " + std::to_string(elem.nodes.size()));
    }
    for (int id : elem.nodes) {
      if (id < 0 || id >= n_nodes) {
        throw MeshError("element " + std::to_string(e) + ": dangling node reference " +
                        std::to_string(id));
      }
    }
    // Orientation: J > 0 at tensor Gauss points up to order 2p.
    const QuadRule1D rule = gauss_legendre(2 * p);
    for (double v : rule.nodes) {
      for (double u : rule.nodes) {
        const MapSample s = map_and_jacobian(elem, mesh.nodes, u, v);
        if (!(s.J > 0.0)) {
          throw GeometryError("element " + std::to_string(e) + ": non-positive Jacobian " +
                              std::to_string(s.J) + " at (u,v)=(" + std::to_string(u) + "," +
                              std::to_string(v) + ")");
        }
      }
    }
    for (int le = 0; le < 4; ++le) {
      const std::array<int, 2> ends = edge_endpoints(elem, le);
      edges[make_edge_key(ends[0], ends[1])].push_back({e, le});
    }
  }
  for (const auto& [key, refs] : edges) {
    if (refs.size() > 2) {
      throw MeshError("edge (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                      ") shared by more than two elements (non-conforming mesh)");
    }
    if (refs.size() == 2) {
      std::vector<int> a = edge_nodes(mesh.elements[static_cast<std::size_t>(refs[0].element)],
                                      refs[0].local_edge);
      std::vector<int> b = edge_nodes(mesh.elements[static_cast<std::size_t>(refs[1].element)],
                                      refs[1].local_edge);
      std::vector<int> b_rev(b.rbegin(), b.rend());
      if (a != b && a != b_rev) {
        throw MeshError("elements " + std::to_string(refs[0].element) + " and " +
                        std::to_string(refs[1].element) +
                        " share an edge with incompatible geometry nodes");
      }
    }
  }
  // boundary_edges must be exactly the single-incidence edges
  std::map<EdgeKey, bool> boundary_seen;
  for (const EdgeRef& ref : mesh.boundary_edges) {
    if (ref.element < 0 || ref.element >= static_cast<int>(mesh.elements.size()) ||
        ref.local_edge < 0 || ref.local_edge > 3) {
      throw MeshError("boundary edge refers to invalid (element, local_edge)");
    }
    const std::array<int, 2> ends =
        edge_endpoints(mesh.elements[static_cast<std::size_t>(ref.element)], ref.local_edge);
    boundary_seen[make_edge_key(ends[0], ends[1])] = true;
  }
  for (const auto& [key, refs] : edges) {
    const bool on_boundary = boundary_seen.count(key) > 0;
    if (refs.size() == 1 && !on_boundary) {
      throw MeshError("edge of element " + std::to_string(refs[0].element) +
                      " is owned by one element but missing from boundary_edges");
    }
    if (refs.size() == 2 && on_boundary) {
      throw MeshError("interior edge of elements " + std::to_string(refs[0].element) + "/" +
                      std::to_string(refs[1].element) + " listed in boundary_edges");
    }
  }
}

Mesh load_mesh(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(std::string("mesh file is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) throw MeshError("unsupported mesh file version");
    Mesh mesh;
    for (const auto& n : j.at("nodes")) {
      mesh.nodes.push_back({n.at(0).get<double>(), n.at(1).get<double>()});
    }
    for (const auto& e : j.at("elements")) {
      CurvedQuadElement elem;
      elem.order = e.at("order").get<int>();
      for (const auto& id : e.at("nodes")) elem.nodes.push_back(id.get<int>());
      mesh.elements.push_back(std::move(elem));
    }
    for (const auto& b : j.at("boundary_edges")) {
      mesh.boundary_edges.push_back({b.at(0).get<int>(), b.at(1).get<int>()});
    }
    mesh.materials.eps_r_text = j.at("materials").at("eps_r").get<std::string>();
    mesh.materials.mu_r_text = j.at("materials").at("mu_r").get<std::string>();
    mesh.materials.eps_r = parse_expr(mesh.materials.eps_r_text);
    mesh.materials.mu_r = parse_expr(mesh.materials.mu_r_text);
    validate_mesh(mesh);
    return mesh;
  } catch (const nlohmann::json::exception& e) {
    throw MeshError(std::string("mesh file schema violation: ") + e.what());
  } catch (const SyntaxError& e) {
    throw MeshError(std::string("bad material expression: ") + e.what());
  }
}

Mesh load_mesh_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_mesh(buf.str());
}

std::string mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["version"] = 1;
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node2& n : mesh.nodes) nodes.push_back({n.x, n.y});
  j["nodes"] = std::move(nodes);
  nlohmann::json elements = nlohmann::json::array();
  for (const CurvedQuadElement& e : mesh.elements) {
    elements.push_back({{"order", e.order}, {"nodes", e.nodes}});
  }
  j["elements"] = std::move(elements);
  nlohmann::json be = nlohmann::json::array();
  for (const EdgeRef& r : mesh.boundary_edges) be.push_back({r.element, r.local_edge});
  j["boundary_edges"] = std::move(be);
  j["materials"] = {{"eps_r", mesh.materials.eps_r_text}, {"mu_r", mesh.materials.mu_r_text}};
  return j.dump(2);
}

void save_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MeshError("cannot write mesh file: " + path);
  out << mesh_to_json(mesh) << "\n";
}

Mesh generate_transfinite_mesh(int nx, int ny, int p, const TransfiniteSpec& spec) {
  if (nx < 1 || ny < 1 || p < 1) {
    throw MeshError("generate_transfinite_mesh: need nx, ny, p >= 1");
  }
  const ExprAst top = parse_expr(spec.top);      // y = top(x)
  const ExprAst right = parse_expr(spec.right);  // x = right(y)

  const auto top_at = [&](double s) { return eval_expr(top, s, 0.0); };
  const auto right_at = [&](double t) { return eval_expr(right, 0.0, t); };

  // Corner positions; left and bottom boundaries are the straight lines
  // x = -1 and y = -1.
  const double x00 = -1.0, y00 = -1.0;
  const double x10 = right_at(-1.0), y10 = -1.0;
  const double x01 = -1.0, y01 = top_at(-1.0);
  const double x11 = right_at(1.0), y11 = top_at(1.0);
  if (std::fabs(top_at(x11) - y11) > 1e-12 || std::fabs(right_at(y11) - x11) > 1e-12) {
    throw MeshError("top and right curves do not meet at a single corner");
  }

  const auto coons = [&](double s, double t, double& x, double& y) {
    const double bm = 0.5 * (1.0 - t), bp = 0.5 * (1.0 + t);
    const double lm = 0.5 * (1.0 - s), lp = 0.5 * (1.0 + s);
    // edge points: bottom (x varies linearly from x00 to x10), top, left, right
    const double xb = lm * x00 + lp * x10, yb = -1.0;
    const double xt = lm * x01 + lp * x11, yt = top_at(xt);
    const double xl = -1.0, yl = bm * y00 + bp * y01;
    const double yr = bm * y10 + bp * y11, xr = right_at(yr);
    x = bm * xb + bp * xt + lm * xl + lp * xr -
        (lm * bm * x00 + lp * bm * x10 + lm * bp * x01 + lp * bp * x11);
    y = bm * yb + bp * yt + lm * yl + lp * yr -
        (lm * bm * y00 + lp * bm * y10 + lm * bp * y01 + lp * bp * y11);
  };

  Mesh mesh;
  const int ns = nx * p + 1;
  const int nt = ny * p + 1;
  mesh.nodes.resize(static_cast<std::size_t>(ns) * static_cast<std::size_t>(nt));
  for (int j = 0; j < nt; ++j) {
    const double t = -1.0 + 2.0 * j / (nt - 1);
    for (int i = 0; i < ns; ++i) {
      const double s = -1.0 + 2.0 * i / (ns - 1);
      double x = 0.0, y = 0.0;
      coons(s, t, x, y);
      mesh.nodes[static_cast<std::size_t>(i + ns * j)] = {x, y};
    }
  }
  for (int ey = 0; ey < ny; ++ey) {
    for (int ex = 0; ex < nx; ++ex) {
      CurvedQuadElement elem;
      elem.order = p;
      elem.nodes.reserve(static_cast<std::size_t>((p + 1) * (p + 1)));
      for (int b = 0; b <= p; ++b) {
        for (int a = 0; a <= p; ++a) {
          elem.nodes.push_back((ex * p + a) + ns * (ey * p + b));
        }
      }
      const int e = static_cast<int>(mesh.elements.size());
      mesh.elements.push_back(std::move(elem));
      if (ey == 0) mesh.boundary_edges.push_back({e, 0});
      if (ex == nx - 1) mesh.boundary_edges.push_back({e, 1});
      if (ey == ny - 1) mesh.boundary_edges.push_back({e, 2});
      if (ex == 0) mesh.boundary_edges.push_back({e, 3});
    }
  }
  mesh.materials.eps_r_text = spec.eps_r;
  mesh.materials.mu_r_text = spec.mu_r;
  mesh.materials.eps_r = parse_expr(spec.eps_r);
  mesh.materials.mu_r = parse_expr(spec.mu_r);
  validate_mesh(mesh);
  return mesh;
}

}  // namespace chebfem
