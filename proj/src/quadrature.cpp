#include "chebfem/quadrature.hpp"

#include <cmath>
#include <string>

namespace chebfem {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = (n == 0) ? p0 : p1;
  dp = (n == 0) ? 0.0 : n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

QuadRule1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need n >= 1");
  QuadRule1D rule;
  rule.nodes.assign(static_cast<std::size_t>(n), 0.0);
  rule.weights.assign(static_cast<std::size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // i-th root counted from +1 downward
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p = 0.0;
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    if (n % 2 == 1 && i == half - 1) x = 0.0;  // center node is exact
    legendre(n, x, p, dp);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    rule.nodes[static_cast<std::size_t>(i)] = -x;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    rule.weights[static_cast<std::size_t>(i)] = w;
  }
  return rule;
}

double integrate2d(const std::function<double(double, double)>& f, int nu, int nv) {
  const QuadRule1D ru = gauss_legendre(nu);
  const QuadRule1D rv = gauss_legendre(nv);
  double sum = 0.0;
  for (int j = 0; j < rv.size(); ++j) {
    double row = 0.0;
    for (int i = 0; i < ru.size(); ++i) {
      const double value = f(ru.nodes[static_cast<std::size_t>(i)], rv.nodes[static_cast<std::size_t>(j)]);
      if (!std::isfinite(value)) {
        throw IntegrationError("non-finite integrand at (u,v)=(" +
                               std::to_string(ru.nodes[static_cast<std::size_t>(i)]) + "," +
                               std::to_string(rv.nodes[static_cast<std::size_t>(j)]) + ")");
      }
      row += ru.weights[static_cast<std::size_t>(i)] * value;
    }
    sum += rv.weights[static_cast<std::size_t>(j)] * row;
  }
  return sum;
}

}  // namespace chebfem
