// Command-line front end: mesh generation, assembly, eigensolve, benchmark,
// convergence study and self-verification.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "chebfem/bench.hpp"
#include "chebfem/eigensolve.hpp"

namespace fs = std::filesystem;
using namespace chebfem;

namespace {

struct MeshSource {
  std::string file;
  std::string domain = "benchmark";  // benchmark | square
  int nx = 4, ny = 4, order = 4;
};

Mesh resolve_mesh(const MeshSource& src) {
  if (!src.file.empty()) return load_mesh_file(src.file);
  if (src.domain == "square") {
    TransfiniteSpec square;
    square.top = "1";
    square.right = "1";
    square.eps_r = "1";
    square.mu_r = "1";
    return generate_transfinite_mesh(src.nx, src.ny, src.order, square);
  }
  if (src.domain == "benchmark") return generate_benchmark_domain(src.nx, src.ny, src.order);
  throw UsageError("unknown domain '" + src.domain + "' (expected benchmark or square)");
}

Orders resolve_orders(const std::vector<int>& values) {
  if (values.size() == 1) return Orders{values[0], values[0]};
  if (values.size() == 2) return Orders{values[0], values[1]};
  throw UsageError("--orders expects M or M,N");
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void add_mesh_options(CLI::App* cmd, MeshSource& src) {
  cmd->add_option("--mesh", src.file, "mesh file (JSON); overrides --domain");
  cmd->add_option("--domain", src.domain, "built-in domain: benchmark or square")
      ->check(CLI::IsMember({"benchmark", "square"}));
  cmd->add_option("--nx", src.nx, "elements in x for built-in domains");
  cmd->add_option("--ny", src.ny, "elements in y for built-in domains");
  cmd->add_option("--geom-order", src.order, "geometric order for built-in domains");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-D high-order curl-conforming FEM with direct and product-to-sum matrix filling"};
  app.require_subcommand(1);

  // mesh-gen
  auto* gen = app.add_subcommand("mesh-gen", "generate a curved transfinite mesh file");
  int gen_nx = 4, gen_ny = 4, gen_order = 4;
  TransfiniteSpec gen_spec;
  std::string gen_out = ".";
  bool gen_square = false;
  gen->add_option("--nx", gen_nx, "elements in x")->check(CLI::PositiveNumber);
  gen->add_option("--ny", gen_ny, "elements in y")->check(CLI::PositiveNumber);
  gen->add_option("--order,-p", gen_order, "geometric order")->check(CLI::PositiveNumber);
  gen->add_option("--top", gen_spec.top, "top boundary curve y = f(x)");
  gen->add_option("--right", gen_spec.right, "right boundary curve x = g(y)");
  gen->add_option("--eps", gen_spec.eps_r, "relative permittivity eps_r(x,y)");
  gen->add_option("--mu", gen_spec.mu_r, "relative permeability mu_r(x,y)");
  gen->add_flag("--square", gen_square, "unit square with homogeneous materials");
  gen->add_option("--out", gen_out, "output directory");

  // assemble
  auto* asm_cmd = app.add_subcommand("assemble", "assemble global S and M, write matrix dumps");
  MeshSource asm_mesh;
  std::vector<int> asm_orders{4};
  std::string asm_backend = "p2s";
  int asm_nq = 0, asm_threads = 1;
  std::string asm_out = ".";
  add_mesh_options(asm_cmd, asm_mesh);
  asm_cmd->add_option("--orders", asm_orders, "expansion orders M[,N]")->delimiter(',');
  asm_cmd->add_option("--backend", asm_backend, "direct or p2s")
      ->check(CLI::IsMember({"direct", "p2s"}));
  asm_cmd->add_option("--quad-points", asm_nq, "quadrature points per direction (0 = auto)");
  asm_cmd->add_option("--threads", asm_threads, "element-parallel fill threads");
  asm_cmd->add_option("--out", asm_out, "output directory for S.txt / M.txt");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "assemble and compute the cavity spectrum");
  MeshSource solve_mesh;
  std::vector<int> solve_orders{4};
  std::string solve_backend = "p2s";
  int solve_nq = 0, solve_threads = 1, solve_eigs = 5;
  double solve_filter = 1e-8;
  std::string solve_out;
  add_mesh_options(solve_cmd, solve_mesh);
  solve_cmd->add_option("--orders", solve_orders, "expansion orders M[,N]")->delimiter(',');
  solve_cmd->add_option("--backend", solve_backend, "direct or p2s")
      ->check(CLI::IsMember({"direct", "p2s"}));
  solve_cmd->add_option("--quad-points", solve_nq, "quadrature points per direction (0 = auto)");
  solve_cmd->add_option("--threads", solve_threads, "element-parallel fill threads");
  solve_cmd->add_option("--num-eigs", solve_eigs, "eigenvalues to print");
  solve_cmd->add_option("--filter-tol", solve_filter, "nullspace filter tolerance");
  solve_cmd->add_option("--out", solve_out, "directory for spectrum.csv (optional)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "time both matrix-filling backends");
  MeshSource bench_mesh;
  BenchOptions bench_opts;
  bench_opts.orders = {4, 6, 8, 10, 12};
  std::string bench_out;
  bench_cmd->add_option("--orders", bench_opts.orders, "M=N values")->delimiter(',');
  bench_cmd->add_option("--reps", bench_opts.reps, "timing repetitions (median reported)")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--with-solve", bench_opts.with_solve,
                      "include the eigensolve in the total time columns");
  bench_cmd->add_option("--threads", bench_opts.threads, "element-parallel fill threads");
  bench_cmd->add_option("--min-sample", bench_opts.min_sample_seconds,
                        "minimum seconds per timing sample");
  add_mesh_options(bench_cmd, bench_mesh);
  bench_cmd->add_option("--out", bench_out, "directory for bench.csv / bench.md");

  // convergence
  auto* conv_cmd = app.add_subcommand("convergence", "eigenvalue convergence of both backends");
  MeshSource conv_mesh;
  ConvergenceOptions conv_opts;
  conv_opts.orders = {2, 3, 4, 6};
  std::string conv_out;
  conv_cmd->add_option("--orders", conv_opts.orders, "ascending M=N values")->delimiter(',');
  conv_cmd->add_option("--eigs", conv_opts.n_eigenvalues, "eigenvalues tracked per order");
  conv_cmd->add_option("--ref-order", conv_opts.ref_order,
                       "self-reference order for non-square domains (expensive when large)");
  conv_cmd->add_option("--filter-tol", conv_opts.filter_tol, "nullspace filter tolerance");
  conv_cmd->add_option("--threads", conv_opts.threads, "element-parallel fill threads");
  add_mesh_options(conv_cmd, conv_mesh);
  conv_cmd->add_option("--out", conv_out, "directory for convergence.csv");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "run the built-in property checks");
  unsigned verify_seed = 12345;
  verify_cmd->add_option("--seed", verify_seed, "random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (gen_square) {
        gen_spec.top = "1";
        gen_spec.right = "1";
        gen_spec.eps_r = "1";
        gen_spec.mu_r = "1";
      }
      const Mesh mesh = generate_transfinite_mesh(gen_nx, gen_ny, gen_order, gen_spec);
      fs::create_directories(gen_out);
      const fs::path path = fs::path(gen_out) / "mesh.json";
      save_mesh_file(mesh, path.string());
      std::cout << "wrote " << path.string() << " (" << mesh.elements.size() << " elements, "
                << mesh.nodes.size() << " nodes)\n";
    } else if (asm_cmd->parsed()) {
      const Mesh mesh = resolve_mesh(asm_mesh);
      const Orders orders = resolve_orders(asm_orders);
      const GlobalSystem sys =
          assemble_system(mesh, orders, backend_from_name(asm_backend), asm_nq, asm_threads);
      fs::create_directories(asm_out);
      {
        std::ofstream s_out(fs::path(asm_out) / "S.txt");
        write_matrix_dump(sys.S, s_out);
        std::ofstream m_out(fs::path(asm_out) / "M.txt");
        write_matrix_dump(sys.M, m_out);
      }
      std::cout << "assembled " << sys.S.rows() << " free DOFs with " << asm_backend
                << " backend (" << sys.n_integrals << " 2-D integrals); wrote S.txt, M.txt\n";
    } else if (solve_cmd->parsed()) {
      const Mesh mesh = resolve_mesh(solve_mesh);
      const Orders orders = resolve_orders(solve_orders);
      const GlobalSystem sys =
          assemble_system(mesh, orders, backend_from_name(solve_backend), solve_nq, solve_threads);
      const Spectrum spec = spectrum(sys, solve_filter);
      std::cout << "free DOFs: " << sys.S.rows() << ", nullspace filtered: "
                << spec.nullspace_count << "\n";
      const int n = std::min<int>(solve_eigs, static_cast<int>(spec.eigenvalues.size()));
      for (int i = 0; i < n; ++i) {
        std::printf("k0^2[%d] = %.12g\n", i + 1, spec.eigenvalues[static_cast<std::size_t>(i)]);
      }
      if (!solve_out.empty()) {
        fs::create_directories(solve_out);
        std::string csv = "index,k0_squared\n";
        char buf[64];
        for (std::size_t i = 0; i < spec.eigenvalues.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i + 1, spec.eigenvalues[i]);
          csv += buf;
        }
        write_file(fs::path(solve_out) / "spectrum.csv", csv);
        std::cout << "wrote " << (fs::path(solve_out) / "spectrum.csv").string() << "\n";
      }
    } else if (bench_cmd->parsed()) {
      const Mesh mesh = resolve_mesh(bench_mesh);
      const BenchReport report = bench_fill(mesh, bench_opts);
      std::cout << bench_markdown(report);
      if (!bench_out.empty()) {
        fs::create_directories(bench_out);
        write_file(fs::path(bench_out) / "bench.csv", bench_csv(report));
        write_file(fs::path(bench_out) / "bench.md", bench_markdown(report));
        std::cout << "wrote bench.csv, bench.md under " << bench_out << "\n";
      }
    } else if (conv_cmd->parsed()) {
      conv_opts.analytic_square_reference = conv_mesh.file.empty() && conv_mesh.domain == "square";
      const Mesh mesh = resolve_mesh(conv_mesh);
      const std::vector<ConvergenceRow> rows = run_convergence(mesh, conv_opts);
      std::cout << convergence_csv(rows);
      if (!conv_out.empty()) {
        fs::create_directories(conv_out);
        write_file(fs::path(conv_out) / "convergence.csv", convergence_csv(rows));
      }
    } else if (verify_cmd->parsed()) {
      const bool ok = run_verification(verify_seed, std::cout);
      return ok ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
