#ifndef CHEBFEM_CHEBYSHEV_HPP
#define CHEBFEM_CHEBYSHEV_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace chebfem {

/// Polynomial families of the hierarchical basis: Chebyshev polynomials of
/// the first kind T_n, of the second kind U_n, and the nonsingular family
/// Tns_n = (T_n - 1)/(2(1-u^2)) for even n, (T_n - u)/(2(1-u^2)) for odd n.
/// Tns_n is a polynomial of degree n-2; Tns_0 and Tns_1 vanish identically.
enum class PolyFamily : std::uint8_t { T, U, Tns };

const char* family_name(PolyFamily fam);

double eval_T(int n, double u);
double eval_U(int n, double u);

/// Evaluates Tns_n through its cached T-basis expansion (Clenshaw), never by
/// dividing by (1-u^2); u = +-1 is a valid argument.
double eval_Tns(int n, double u);

double eval_poly(PolyFamily fam, int n, double u);

/// T-basis coefficients of Tns_n (all small integers, degree n-2).
/// Populated once per degree; safe to call from concurrent readers.
const std::vector<double>& tns_coefficients(int n);

struct SumTerm {
  double coeff;
  PolyFamily family;
  int degree;
};

/// A polynomial product rewritten as a short sum of basis polynomials.
/// At most two terms; terms with equal (family, degree) are merged and zero
/// coefficients dropped.
class SumExpansion {
 public:
  void add(double coeff, PolyFamily family, int degree);

  int size() const { return count_; }
  bool empty() const { return count_ == 0; }
  const SumTerm* begin() const { return terms_.data(); }
  const SumTerm* end() const { return terms_.data() + count_; }
  const SumTerm& operator[](int i) const { return terms_[static_cast<std::size_t>(i)]; }

  double eval(double u) const;

 private:
  std::array<SumTerm, 2> terms_{};
  int count_ = 0;
};

/// Exact rewrite of a product of two T/U polynomials of the same variable:
///   U_a U_b = Tns_|a-b| - Tns_{a+b+2}
///   T_a T_b = (T_|a-b| + T_{a+b}) / 2
///   U_a T_b = (U_{a-b} + U_{a+b}) / 2   with signed U indices normalized
/// Tns inputs are rejected; products of Tns never occur.
SumExpansion product_to_sum(PolyFamily fam_a, int a, PolyFamily fam_b, int b);

/// Resolves a signed second-kind index: U_k for k >= 0, U_{-1} = 0, and
/// U_k = -U_{-k-2} for k <= -2.
SumExpansion normalize_signed_U(int k);

}  // namespace chebfem

#endif
