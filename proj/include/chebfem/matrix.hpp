#ifndef CHEBFEM_MATRIX_HPP
#define CHEBFEM_MATRIX_HPP

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace chebfem {

/// Dense row-major matrix; desk-scale problems only, no sparse storage.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) {
    return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(j)];
  }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
                 static_cast<std::size_t>(j)];
  }

  double* row(int i) { return data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_); }
  const double* row(int i) const {
    return data_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_);
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Mat transpose(const Mat& a);

/// Largest |a_ij - a_ji| over the matrix (0 for non-square input is invalid).
double max_asymmetry(const Mat& a);

double max_abs(const Mat& a);

/// One `i j value` line per entry with 17 significant digits; symmetric
/// entries are both written.
void write_matrix_dump(const Mat& a, std::ostream& out);
Mat read_matrix_dump(std::istream& in);

}  // namespace chebfem

#endif
