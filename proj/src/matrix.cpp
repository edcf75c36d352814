#include "chebfem/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace chebfem {

Mat transpose(const Mat& a) {
  Mat t(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

double max_asymmetry(const Mat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = i + 1; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j) - a(j, i)));
  }
  return m;
}

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::fabs(v));
  return m;
}

void write_matrix_dump(const Mat& a, std::ostream& out) {
  char buf[64];
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i, j, a(i, j));
      out << buf;
    }
  }
}

Mat read_matrix_dump(std::istream& in) {
  std::map<std::pair<int, int>, double> entries;
  int max_i = -1;
  int max_j = -1;
  int i = 0;
  int j = 0;
  double v = 0.0;
  while (in >> i >> j >> v) {
    entries[{i, j}] = v;
    max_i = std::max(max_i, i);
    max_j = std::max(max_j, j);
  }
  Mat a(max_i + 1, max_j + 1);
  for (const auto& [key, value] : entries) a(key.first, key.second) = value;
  return a;
}

}  // namespace chebfem
