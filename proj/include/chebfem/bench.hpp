#ifndef CHEBFEM_BENCH_HPP
#define CHEBFEM_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "chebfem/assembly.hpp"

namespace chebfem {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operation-count model: the product-to-sum fill needs ~53 D^2 multiply-adds
/// against ~3.5 D^3 for per-entry direct integration at a 2D-point budget,
/// a predicted fill-time reduction of D/15 with D = M N.
double predicted_reduction(int M, int N);

/// Model count of 2-D integrals for one mass block: ceil(D^2/4) for the
/// direct backend (four-fold symmetry exploited) and the exact kernel-table
/// size (2M+1)(2N+1) (~4D) for the product-to-sum backend.
long integral_count(int M, int N, Backend backend);

/// Per-direction quadrature points giving ~2D total sample points per 2-D
/// integral, the minimal direct-integration budget of the cost model.
int bench_quad_points(int M, int N);

struct BenchRow {
  int M = 0;
  int N = 0;
  double fill_p2s_s = 0.0;
  double total_p2s_s = 0.0;
  double fill_direct_s = 0.0;
  double total_direct_s = 0.0;
  double measured_reduction = 0.0;
  double predicted_reduction = 0.0;
  long p2s_integrals = 0;     // instrumented, whole mesh
  long direct_integrals = 0;  // instrumented, whole mesh
  long p2s_integrals_model = 0;
  long direct_integrals_model = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  int reps = 0;
  bool with_solve = false;
};

struct BenchOptions {
  std::vector<int> orders;  // M = N values
  int reps = 3;
  bool with_solve = false;  // total columns include transform+scatter+eigensolve
  int threads = 1;
  double filter_tol = 1e-8;
  double min_sample_seconds = 0.02;  // short fills are looped and averaged
};

/// Times both backends on the given mesh at the 2D-point direct budget;
/// one warm-up run per case is discarded and medians over reps reported.
BenchReport bench_fill(const Mesh& mesh, const BenchOptions& options);

struct ConvergenceRow {
  int order = 0;      // M = N
  int eig_index = 0;  // 1-based, lowest first
  double lambda_direct = 0.0;
  double lambda_p2s = 0.0;
  double backend_rel_diff = 0.0;
  double lambda_ref = 0.0;  // NaN when no reference is available
  double err_direct = 0.0;
  double err_p2s = 0.0;
};

struct ConvergenceOptions {
  std::vector<int> orders;  // ascending M = N values
  int n_eigenvalues = 5;
  double filter_tol = 1e-8;
  int threads = 1;
  bool analytic_square_reference = false;  // PEC square [-1,1]^2 reference
  int ref_order = 18;                      // self-reference order when not analytic
};

/// Lowest eigenvalues from both backends per order, with relative backend
/// differences and errors against the reference.
std::vector<ConvergenceRow> run_convergence(const Mesh& mesh, const ConvergenceOptions& options);

/// Analytic PEC cavity eigenvalues of the square [-1,1]^2 with eps = mu = 1:
/// (pi/2)^2 (i^2 + j^2), i,j >= 0 not both zero, ascending with multiplicity.
std::vector<double> analytic_square_eigenvalues(int count);

std::string bench_csv(const BenchReport& report);
std::string bench_markdown(const BenchReport& report);
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

/// CSV with time columns blanked, for byte-comparison across runs.
std::string bench_csv_without_times(const BenchReport& report);

/// Single curved element: reference-grid nodes with bounded random
/// perturbations (retried with shrinking amplitude until the Jacobian stays
/// positive) and randomly drawn smooth positive materials.
Mesh random_single_element_mesh(std::mt19937& rng, int geometric_order, double amplitude = 0.08);

/// Entrywise comparison of two fills: |a-b| <= rtol*max(|a|,|b|) with a
/// roundoff floor of 1e-12 times the block magnitude.
bool element_matrices_close(const ElementMatrices& a, const ElementMatrices& b, double rtol,
                            std::string* message = nullptr);

/// Lightweight self-checks (identity exactness, quadrature, backend
/// equivalence on random elements, analytic cavity, count model); prints one
/// line per check and returns false on any failure.
bool run_verification(unsigned seed, std::ostream& out);

}  // namespace chebfem

#endif
