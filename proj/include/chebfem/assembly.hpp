#ifndef CHEBFEM_ASSEMBLY_HPP
#define CHEBFEM_ASSEMBLY_HPP

#include <vector>

#include "chebfem/dof_map.hpp"
#include "chebfem/matrix.hpp"
#include "chebfem/mesh.hpp"

namespace chebfem {

enum class Backend { direct, p2s };

const char* backend_name(Backend b);
Backend backend_from_name(const std::string& name);

/// Per-element stiffness/mass blocks. Row/column index layout matches the
/// local DOF numbering: E_u index m*(N+1)+n, E_v index m*N+n. S_vu and M_vu
/// are exact transposes of S_uv and M_uv.
struct ElementMatrices {
  Orders orders;
  Mat Suu, Suv, Svu, Svv;
  Mat Muu, Muv, Mvu, Mvv;
  long n_integrals = 0;          // 2-D quadratures evaluated for this element
  long n_mass_uu_integrals = 0;  // of which for the M_uu block (or Kuu table)
};

/// Precomputed 2-D integrals of single kernel polynomials against the
/// coupling factors:
///   Ks (m,n)  = // Tns_m(u) Tns_n(v) / (mu_r J)              m<=2M, n<=2N
///   Kuu(m,n)  = // Tns_m(u) T_n(v)  eps_r (x_v^2+y_v^2)/J    m<=2M, n<=2N
///   Kuv(m,n)  = // U_m(u)  U_n(v)   eps_r (x_u x_v+y_u y_v)/J  m<2M, n<2N
///   Kvv(m,n)  = // T_m(u)  Tns_n(v) eps_r (x_u^2+y_u^2)/J    m<=2M, n<=2N
/// Entries whose Tns index is 0 or 1 are exactly zero.
struct KernelTable {
  Orders orders;
  Mat Ks, Kuu, Kuv, Kvv;
  long n_integrals = 0;
  long n_mass_uu_integrals = 0;  // entries of Kuu
};

/// Default tensor quadrature points per direction; generous enough that
/// backend comparisons are limited by roundoff rather than quadrature error.
int default_quad_points(const Orders& orders, int geometric_order);

/// Every entry by one full 2-D quadrature of its integrand. The stiffness
/// coupling factor is 1/(mu_r J); the mass factors are the covariant-pullback
/// combinations per block. Blocks with a vanishing derivative prefactor
/// (n1 n2 = 0 rows of S_uu etc.) are zero without integration.
ElementMatrices assemble_direct_element(const Mesh& mesh, int elem, const Orders& orders, int nq);

KernelTable compute_kernel_tables(const Mesh& mesh, int elem, const Orders& orders, int nq);

/// Combines kernel-table entries through the product-to-sum expansions;
/// every entry touches at most four table entries per direction pair.
ElementMatrices assemble_p2s_element(const KernelTable& kernels, const Orders& orders);

/// Change of basis on the first-kind direction that splits edge traces from
/// zero-trace interior modes:
///   e_0 = (T_0 - T_1)/2, e_1 = (T_0 + T_1)/2, e_n = T_n - T_{n mod 2} (n>=2).
/// Column k holds e_k in T coefficients; at most 2 nonzeros per column.
Mat conforming_matrix(int max_degree);

/// Applies R^t X R on the T-indexed axes (v-axis of E_u, u-axis of E_v) of
/// all blocks in place; rebuilds the vu blocks by transposition.
void apply_conforming_transform(ElementMatrices& em);

struct GlobalSystem {
  Mat S, M;          // over free global DOFs
  DofMap dof_map;
  Orders orders;
  long n_integrals = 0;
};

/// Scatter-add with orientation signs; PEC-constrained rows/columns removed.
/// Aborts when the result is asymmetric beyond 1e-10 relative.
GlobalSystem assemble_global(const Mesh& mesh, const DofMap& dof_map,
                             const std::vector<ElementMatrices>& elements);

/// Raw per-element fill with either backend; element-parallel when
/// threads > 1, with results identical to the serial order.
std::vector<ElementMatrices> fill_elements(const Mesh& mesh, const Orders& orders,
                                           Backend backend, int nq, int threads = 1);

/// Full pipeline: connectivity, fill, conforming transform, scatter.
/// nq = 0 selects the default budget.
GlobalSystem assemble_system(const Mesh& mesh, const Orders& orders, Backend backend,
                             int nq = 0, int threads = 1);

}  // namespace chebfem

#endif
