#include "chebfem/dof_map.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace chebfem {

namespace {

struct EdgeInfo {
  int first_global = -1;  // global id of mode 0
  int n_modes = 0;
  bool u_type = false;  // tangential parameter is u (local edges 0/2)
};

using EdgeKey = std::pair<int, int>;

}  // namespace

DofMap build_connectivity(const Mesh& mesh, int M, int N) {
  if (M < 1 || N < 1) throw MeshError("build_connectivity: need M, N >= 1");
  validate_mesh(mesh);

  const Orders orders{M, N};
  DofMap map;
  map.M = M;
  map.N = N;
  map.element_dofs.resize(mesh.elements.size());

  std::map<EdgeKey, EdgeInfo> edge_dofs;
  int next_global = 0;

  const auto edge_mode_base = [&](const CurvedQuadElement& elem, int local_edge,
                                  bool u_type) -> EdgeInfo& {
    const std::array<int, 2> ends = edge_endpoints(elem, local_edge);
    const EdgeKey key{std::min(ends[0], ends[1]), std::max(ends[0], ends[1])};
    auto it = edge_dofs.find(key);
    const int n_modes = u_type ? M : N;
    if (it == edge_dofs.end()) {
      EdgeInfo info;
      info.first_global = next_global;
      info.n_modes = n_modes;
      info.u_type = u_type;
      next_global += n_modes;
      it = edge_dofs.emplace(key, info).first;
    } else if (it->second.n_modes != n_modes) {
      throw MeshError("shared edge joins sides with different tangential mode counts (" +
                      std::to_string(it->second.n_modes) + " vs " + std::to_string(n_modes) +
                      "); use M == N for rotated neighbors");
    }
    return it->second;
  };

  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    const CurvedQuadElement& elem = mesh.elements[e];
    std::vector<DofMap::LocalDof>& dofs = map.element_dofs[e];
    dofs.assign(static_cast<std::size_t>(orders.n_local()), {});

    const auto assign_edge_mode = [&](int local_dof, int local_edge, int mode, bool u_type) {
      const EdgeInfo& info = edge_mode_base(elem, local_edge, u_type);
      const std::array<int, 2> ends = edge_endpoints(elem, local_edge);
      const bool aligned = ends[0] < ends[1];  // canonical direction: low id -> high id
      // Opposite traversal flips both the trace parameter (U_m parity) and
      // the tangential direction, so sign = -(-1)^m.
      const double sign = aligned ? 1.0 : ((mode % 2 == 0) ? -1.0 : 1.0);
      dofs[static_cast<std::size_t>(local_dof)] = {info.first_global + mode, sign};
    };

    // E_u block: trace modes live on the v=-1 / v=+1 edges
    for (int m = 0; m < M; ++m) {
      for (int n = 0; n <= N; ++n) {
        const int local = m * (N + 1) + n;
        if (n == 0) {
          assign_edge_mode(local, 0, m, true);
        } else if (n == 1) {
          assign_edge_mode(local, 2, m, true);
        } else {
          dofs[static_cast<std::size_t>(local)] = {next_global++, 1.0};
        }
      }
    }
    // E_v block: trace modes live on the u=-1 / u=+1 edges
    for (int m = 0; m <= M; ++m) {
      for (int n = 0; n < N; ++n) {
        const int local = orders.n_eu() + m * N + n;
        if (m == 0) {
          assign_edge_mode(local, 3, n, false);
        } else if (m == 1) {
          assign_edge_mode(local, 1, n, false);
        } else {
          dofs[static_cast<std::size_t>(local)] = {next_global++, 1.0};
        }
      }
    }
  }

  map.n_global = next_global;

  // PEC: every edge mode on a boundary edge is constrained.
  std::set<int> constrained;
  for (const EdgeRef& ref : mesh.boundary_edges) {
    const CurvedQuadElement& elem = mesh.elements[static_cast<std::size_t>(ref.element)];
    const std::array<int, 2> ends = edge_endpoints(elem, ref.local_edge);
    const EdgeKey key{std::min(ends[0], ends[1]), std::max(ends[0], ends[1])};
    const auto it = edge_dofs.find(key);
    if (it == edge_dofs.end()) continue;  // validate_mesh already vetted the list
    for (int k = 0; k < it->second.n_modes; ++k) constrained.insert(it->second.first_global + k);
  }
  map.constrained.assign(constrained.begin(), constrained.end());

  map.free_index.assign(static_cast<std::size_t>(map.n_global), -1);
  int next_free = 0;
  for (int g = 0; g < map.n_global; ++g) {
    if (!constrained.count(g)) map.free_index[static_cast<std::size_t>(g)] = next_free++;
  }
  map.n_free = next_free;
  return map;
}

}  // namespace chebfem
