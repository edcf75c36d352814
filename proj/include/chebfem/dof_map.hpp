#ifndef CHEBFEM_DOF_MAP_HPP
#define CHEBFEM_DOF_MAP_HPP

#include <vector>

#include "chebfem/mesh.hpp"

namespace chebfem {

/// Expansion orders of the hierarchical basis. The E_u component carries
/// U_m(u) (m < M) times the conforming v-basis of size N+1; E_v is the
/// transpose arrangement. D = M*N is the cost-model unknown count.
struct Orders {
  int M = 1;
  int N = 1;
  int D() const { return M * N; }
  int n_eu() const { return M * (N + 1); }
  int n_ev() const { return (M + 1) * N; }
  int n_local() const { return n_eu() + n_ev(); }
};

/// Local hierarchical DOF numbering after the conforming transform:
///   E_u: dof = m*(N+1) + n, m in [0,M), n in [0,N];
///        n = 0 is the edge trace on v=-1 (local edge 0), n = 1 the trace on
///        v=+1 (local edge 2), n >= 2 interior.
///   E_v: dof = M*(N+1) + m*N + n, m in [0,M], n in [0,N);
///        m = 0 traces on u=-1 (local edge 3), m = 1 on u=+1 (local edge 1),
///        m >= 2 interior.
/// Shared-edge modes of neighboring elements unify to one global index; the
/// orientation sign makes the tangential trace (as a 1-form along the edge)
/// identical from both sides.
struct DofMap {
  struct LocalDof {
    int global = -1;     // global dof id (constrained ids included)
    double sign = 1.0;   // +1 or -1
  };

  int M = 0;
  int N = 0;
  int n_global = 0;
  int n_free = 0;
  std::vector<std::vector<LocalDof>> element_dofs;  // [element][local dof]
  std::vector<int> constrained;                     // PEC global ids, sorted
  std::vector<int> free_index;                      // global id -> free id or -1

  bool is_constrained(int global) const { return free_index[static_cast<std::size_t>(global)] < 0; }
};

/// Builds the global numbering for orders (M, N) on a validated conforming
/// mesh. Rejects hanging nodes and rotated shared edges with mismatched
/// tangential mode counts.
DofMap build_connectivity(const Mesh& mesh, int M, int N);

}  // namespace chebfem

#endif
