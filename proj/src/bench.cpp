#include "chebfem/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <sstream>

#include "chebfem/chebyshev.hpp"
#include "chebfem/eigensolve.hpp"
#include "chebfem/quadrature.hpp"

namespace chebfem {

double predicted_reduction(int M, int N) {
  if (M < 1 || N < 1) throw UsageError("predicted_reduction: need M, N >= 1");
  return static_cast<double>(M) * static_cast<double>(N) / 15.0;
}

long integral_count(int M, int N, Backend backend) {
  if (M < 1 || N < 1) throw UsageError("integral_count: need M, N >= 1");
  const long d = static_cast<long>(M) * N;
  if (backend == Backend::direct) return (d * d + 3) / 4;  // ceil(D^2/4)
  return static_cast<long>(2 * M + 1) * (2 * N + 1);
}

int bench_quad_points(int M, int N) {
  const double d = static_cast<double>(M) * N;
  return std::max(2, static_cast<int>(std::ceil(std::sqrt(2.0 * d))));
}

namespace {

constexpr double kPi = 3.14159265358979323846;

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point t0, Clock::time_point t1) {
  return std::chrono::duration<double>(t1 - t0).count();
}

// Wall time of f(); short runs are looped and averaged so that sub-ms fills
// are not dominated by clock noise.
template <typename F>
double time_call(F&& f, double min_seconds) {
  Clock::time_point t0 = Clock::now();
  f();
  Clock::time_point t1 = Clock::now();
  const double dt = elapsed_seconds(t0, t1);
  if (dt >= min_seconds) return dt;
  const int reps = std::min(10000, static_cast<int>(std::ceil(min_seconds / std::max(dt, 1e-8))));
  t0 = Clock::now();
  for (int i = 0; i < reps; ++i) f();
  t1 = Clock::now();
  return elapsed_seconds(t0, t1) / reps;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

BenchReport bench_fill(const Mesh& mesh, const BenchOptions& options) {
  if (options.reps < 1) throw UsageError("bench_fill: reps must be >= 1");
  if (options.orders.empty()) throw UsageError("bench_fill: no orders given");

  BenchReport report;
  report.reps = options.reps;
  report.with_solve = options.with_solve;
  const long n_elems = static_cast<long>(mesh.elements.size());

  for (int order : options.orders) {
    const Orders orders{order, order};
    const int nq = bench_quad_points(order, order);
    BenchRow row;
    row.M = order;
    row.N = order;
    row.predicted_reduction = predicted_reduction(order, order);
    row.p2s_integrals_model = integral_count(order, order, Backend::p2s) * n_elems;
    row.direct_integrals_model = integral_count(order, order, Backend::direct) * n_elems;

    // warm-up runs double as the instrumentation pass
    {
      std::vector<ElementMatrices> w =
          fill_elements(mesh, orders, Backend::direct, nq, options.threads);
      for (const ElementMatrices& em : w) row.direct_integrals += em.n_integrals;
      w = fill_elements(mesh, orders, Backend::p2s, nq, options.threads);
      for (const ElementMatrices& em : w) row.p2s_integrals += em.n_integrals;
    }

    const auto fill_time = [&](Backend backend) {
      std::vector<double> samples;
      samples.reserve(static_cast<std::size_t>(options.reps));
      for (int rep = 0; rep < options.reps; ++rep) {
        samples.push_back(time_call(
            [&] {
              std::vector<ElementMatrices> e =
                  fill_elements(mesh, orders, backend, nq, options.threads);
              for (ElementMatrices& em : e) apply_conforming_transform(em);
            },
            options.min_sample_seconds));
      }
      return median(samples);
    };

    const auto total_time = [&](Backend backend) {
      std::vector<double> samples;
      samples.reserve(static_cast<std::size_t>(options.reps));
      for (int rep = 0; rep < options.reps; ++rep) {
        samples.push_back(time_call(
            [&] {
              GlobalSystem sys = assemble_system(mesh, orders, backend, nq, options.threads);
              if (options.with_solve) spectrum(sys, options.filter_tol);
            },
            options.min_sample_seconds));
      }
      return median(samples);
    };

    row.fill_direct_s = fill_time(Backend::direct);
    row.fill_p2s_s = fill_time(Backend::p2s);
    row.total_direct_s = total_time(Backend::direct);
    row.total_p2s_s = total_time(Backend::p2s);
    row.measured_reduction = row.fill_direct_s / row.fill_p2s_s;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<double> analytic_square_eigenvalues(int count) {
  std::vector<double> values;
  const int k = 24;
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j) {
      if (i == 0 && j == 0) continue;
      values.push_back(0.25 * kPi * kPi * (i * i + j * j));
    }
  }
  std::sort(values.begin(), values.end());
  values.resize(static_cast<std::size_t>(count));
  return values;
}

std::vector<ConvergenceRow> run_convergence(const Mesh& mesh, const ConvergenceOptions& options) {
  if (options.orders.empty()) throw UsageError("run_convergence: no orders given");
  if (!std::is_sorted(options.orders.begin(), options.orders.end())) {
    throw UsageError("run_convergence: orders must be ascending");
  }

  std::vector<double> reference;
  if (options.analytic_square_reference) {
    reference = analytic_square_eigenvalues(options.n_eigenvalues);
  } else {
    const Orders ref_orders{options.ref_order, options.ref_order};
    GlobalSystem sys = assemble_system(mesh, ref_orders, Backend::p2s, 0, options.threads);
    const Spectrum spec = spectrum(sys, options.filter_tol);
    reference.assign(spec.eigenvalues.begin(),
                     spec.eigenvalues.begin() +
                         std::min<std::size_t>(spec.eigenvalues.size(),
                                               static_cast<std::size_t>(options.n_eigenvalues)));
  }

  std::vector<ConvergenceRow> rows;
  for (int order : options.orders) {
    const Orders orders{order, order};
    GlobalSystem sys_d = assemble_system(mesh, orders, Backend::direct, 0, options.threads);
    GlobalSystem sys_p = assemble_system(mesh, orders, Backend::p2s, 0, options.threads);
    const Spectrum spec_d = spectrum(sys_d, options.filter_tol);
    const Spectrum spec_p = spectrum(sys_p, options.filter_tol);
    const int n = std::min<int>(
        {options.n_eigenvalues, static_cast<int>(spec_d.eigenvalues.size()),
         static_cast<int>(spec_p.eigenvalues.size())});
    for (int i = 0; i < n; ++i) {
      ConvergenceRow row;
      row.order = order;
      row.eig_index = i + 1;
      row.lambda_direct = spec_d.eigenvalues[static_cast<std::size_t>(i)];
      row.lambda_p2s = spec_p.eigenvalues[static_cast<std::size_t>(i)];
      row.backend_rel_diff = std::fabs(row.lambda_direct - row.lambda_p2s) /
                             std::max(std::fabs(row.lambda_direct), std::fabs(row.lambda_p2s));
      if (i < static_cast<int>(reference.size())) {
        row.lambda_ref = reference[static_cast<std::size_t>(i)];
        row.err_direct = std::fabs(row.lambda_direct - row.lambda_ref) / row.lambda_ref;
        row.err_p2s = std::fabs(row.lambda_p2s - row.lambda_ref) / row.lambda_ref;
      } else {
        row.lambda_ref = std::nan("");
        row.err_direct = std::nan("");
        row.err_p2s = std::nan("");
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "M,N,fill_p2s_s,total_p2s_s,fill_direct_s,total_direct_s,"
         "measured_reduction,predicted_reduction,"
         "p2s_integrals,direct_integrals,p2s_integrals_model,direct_integrals_model\n";
  for (const BenchRow& r : report.rows) {
    out << r.M << ',' << r.N << ',' << fmt(r.fill_p2s_s) << ',' << fmt(r.total_p2s_s) << ','
        << fmt(r.fill_direct_s) << ',' << fmt(r.total_direct_s) << ','
        << fmt(r.measured_reduction) << ',' << fmt(r.predicted_reduction) << ','
        << r.p2s_integrals << ',' << r.direct_integrals << ',' << r.p2s_integrals_model << ','
        << r.direct_integrals_model << '\n';
  }
  return out.str();
}

std::string bench_csv_without_times(const BenchReport& report) {
  std::ostringstream out;
  out << "M,N,predicted_reduction,"
         "p2s_integrals,direct_integrals,p2s_integrals_model,direct_integrals_model\n";
  for (const BenchRow& r : report.rows) {
    out << r.M << ',' << r.N << ',' << fmt(r.predicted_reduction) << ',' << r.p2s_integrals
        << ',' << r.direct_integrals << ',' << r.p2s_integrals_model << ','
        << r.direct_integrals_model << '\n';
  }
  return out.str();
}

std::string bench_markdown(const BenchReport& report) {
  std::ostringstream out;
  out << "| M=N | P2S fill (s) | P2S total (s) | Direct fill (s) | Direct total (s) "
         "| Measured reduction | Predicted (MN/15) |\n";
  out << "|----:|-------------:|--------------:|----------------:|-----------------:"
         "|-------------------:|------------------:|\n";
  char buf[160];
  for (const BenchRow& r : report.rows) {
    std::snprintf(buf, sizeof buf, "| %d | %.4g | %.4g | %.4g | %.4g | %.3g | %.3g |\n", r.M,
                  r.fill_p2s_s, r.total_p2s_s, r.fill_direct_s, r.total_direct_s,
                  r.measured_reduction, r.predicted_reduction);
    out << buf;
  }
  return out.str();
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::ostringstream out;
  out << "order,eig_index,lambda_direct,lambda_p2s,backend_rel_diff,lambda_ref,"
         "err_direct,err_p2s\n";
  for (const ConvergenceRow& r : rows) {
    out << r.order << ',' << r.eig_index << ',' << fmt(r.lambda_direct) << ','
        << fmt(r.lambda_p2s) << ',' << fmt(r.backend_rel_diff) << ',' << fmt(r.lambda_ref) << ','
        << fmt(r.err_direct) << ',' << fmt(r.err_p2s) << '\n';
  }
  return out.str();
}

}  // namespace chebfem
