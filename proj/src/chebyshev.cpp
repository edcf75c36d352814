#include "chebfem/chebyshev.hpp"

#include <cmath>
#include <deque>
#include <mutex>
#include <stdexcept>
#include <string>

namespace chebfem {

const char* family_name(PolyFamily fam) {
  switch (fam) {
    case PolyFamily::T: return "T";
    case PolyFamily::U: return "U";
    case PolyFamily::Tns: return "Tns";
  }
  return "?";
}

// The three-term recurrences run in extended precision: their roundoff grows
// like n^2 near u = +-1, which at degree ~40 would brush the 1e-12 band the
// product-to-sum identities are held to.
double eval_T(int n, double u) {
  if (n < 0) throw std::invalid_argument("eval_T: negative degree " + std::to_string(n));
  if (n == 0) return 1.0;
  const long double x = u;
  long double prev = 1.0L;
  long double cur = x;
  for (int k = 1; k < n; ++k) {
    const long double next = 2.0L * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return static_cast<double>(cur);
}

double eval_U(int n, double u) {
  if (n < 0) {
    throw std::invalid_argument("eval_U: negative degree " + std::to_string(n) +
                                " (use normalize_signed_U)");
  }
  if (n == 0) return 1.0;
  const long double x = u;
  long double prev = 1.0L;
  long double cur = 2.0L * x;
  for (int k = 1; k < n; ++k) {
    const long double next = 2.0L * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return static_cast<double>(cur);
}

namespace {

// Tns_n expanded in the T basis. From the trigonometric factorizations
//   Tns_{2s}   = -U_{s-1}^2        = -( s T_0 + sum_{m=1}^{s-1} 2(s-m) T_{2m} )
//   Tns_{2s+1} = -U_s U_{s-1}      = -( sum_{q=0}^{s-1} 2(s-q) T_{2q+1} )
// so every coefficient is a small integer and evaluation stays finite at
// u = +-1 where the defining quotient is removable.
std::vector<double> make_tns_coefficients(int n) {
  if (n < 2) return {};
  std::vector<double> c(static_cast<std::size_t>(n - 1), 0.0);
  if (n % 2 == 0) {
    const int s = n / 2;
    c[0] = -static_cast<double>(s);
    for (int m = 1; m <= s - 1; ++m) c[static_cast<std::size_t>(2 * m)] = -2.0 * (s - m);
  } else {
    const int s = (n - 1) / 2;
    for (int q = 0; q <= s - 1; ++q) c[static_cast<std::size_t>(2 * q + 1)] = -2.0 * (s - q);
  }
  return c;
}

}  // namespace

const std::vector<double>& tns_coefficients(int n) {
  if (n < 0) throw std::invalid_argument("tns_coefficients: negative degree");
  static std::mutex mutex;
  static std::deque<std::vector<double>> cache;  // deque keeps references stable
  static std::deque<bool> built;
  std::lock_guard<std::mutex> lock(mutex);
  if (static_cast<int>(cache.size()) <= n) {
    cache.resize(static_cast<std::size_t>(n) + 1);
    built.resize(static_cast<std::size_t>(n) + 1, false);
  }
  if (!built[static_cast<std::size_t>(n)]) {
    cache[static_cast<std::size_t>(n)] = make_tns_coefficients(n);
    built[static_cast<std::size_t>(n)] = true;
  }
  return cache[static_cast<std::size_t>(n)];
}

double eval_Tns(int n, double u) {
  if (n < 0) throw std::invalid_argument("eval_Tns: negative degree " + std::to_string(n));
  if (n < 2) return 0.0;
  const std::vector<double>& c = tns_coefficients(n);
  // Clenshaw for sum c_k T_k(u)
  const long double x = u;
  long double b1 = 0.0L;
  long double b2 = 0.0L;
  for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
    const long double b = c[static_cast<std::size_t>(k)] + 2.0L * x * b1 - b2;
    b2 = b1;
    b1 = b;
  }
  return static_cast<double>(c[0] + x * b1 - b2);
}

double eval_poly(PolyFamily fam, int n, double u) {
  switch (fam) {
    case PolyFamily::T: return eval_T(n, u);
    case PolyFamily::U: return eval_U(n, u);
    case PolyFamily::Tns: return eval_Tns(n, u);
  }
  throw std::invalid_argument("eval_poly: bad family");
}

void SumExpansion::add(double coeff, PolyFamily family, int degree) {
  if (coeff == 0.0) return;
  for (int i = 0; i < count_; ++i) {
    SumTerm& t = terms_[static_cast<std::size_t>(i)];
    if (t.family == family && t.degree == degree) {
      t.coeff += coeff;
      if (t.coeff == 0.0) {
        terms_[static_cast<std::size_t>(i)] = terms_[static_cast<std::size_t>(count_ - 1)];
        --count_;
      }
      return;
    }
  }
  if (count_ >= 2) throw std::logic_error("SumExpansion: more than two distinct terms");
  terms_[static_cast<std::size_t>(count_++)] = SumTerm{coeff, family, degree};
}

double SumExpansion::eval(double u) const {
  double s = 0.0;
  for (int i = 0; i < count_; ++i) {
    const SumTerm& t = terms_[static_cast<std::size_t>(i)];
    s += t.coeff * eval_poly(t.family, t.degree, u);
  }
  return s;
}

SumExpansion normalize_signed_U(int k) {
  SumExpansion e;
  if (k >= 0) {
    e.add(1.0, PolyFamily::U, k);
  } else if (k <= -2) {
    e.add(-1.0, PolyFamily::U, -k - 2);
  }
  // k == -1: U_{-1} = 0, empty expansion
  return e;
}

SumExpansion product_to_sum(PolyFamily fam_a, int a, PolyFamily fam_b, int b) {
  if (a < 0 || b < 0) throw std::invalid_argument("product_to_sum: negative degree");
  if (fam_a == PolyFamily::Tns || fam_b == PolyFamily::Tns) {
    throw std::invalid_argument("product_to_sum: Tns factors do not occur in products");
  }
  SumExpansion e;
  if (fam_a == PolyFamily::U && fam_b == PolyFamily::U) {
    e.add(1.0, PolyFamily::Tns, std::abs(a - b));
    e.add(-1.0, PolyFamily::Tns, a + b + 2);
  } else if (fam_a == PolyFamily::T && fam_b == PolyFamily::T) {
    e.add(0.5, PolyFamily::T, std::abs(a - b));
    e.add(0.5, PolyFamily::T, a + b);
  } else {
    // U_a T_b (or T_a U_b; the product commutes)
    const int udeg = (fam_a == PolyFamily::U) ? a : b;
    const int tdeg = (fam_a == PolyFamily::U) ? b : a;
    for (const SumTerm& t : normalize_signed_U(udeg - tdeg)) {
      e.add(0.5 * t.coeff, t.family, t.degree);
    }
    e.add(0.5, PolyFamily::U, udeg + tdeg);
  }
  return e;
}

}  // namespace chebfem
