#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dbmc {

using Vector = std::vector<double>;

// Dense row-major real matrix. Sizes here are at most a few hundred, so no
// blocking or expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector column(std::size_t j) const;

  std::span<const double> data() const noexcept { return data_; }

  Matrix transposed() const;
  Vector row_sums() const;
  Vector column_sums() const;

  double max_abs() const;
  // max |A(i,j) - A(j,i)|
  double max_asymmetry() const;

  Matrix& operator*=(double s);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Vector operator*(const Matrix& a, std::span<const double> x);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator*(Matrix a, double s) { return a *= s; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }

// A^n by repeated squaring; A^0 = I.
Matrix matrix_power(const Matrix& a, unsigned n);

// max_{ij} |A(i,j) - B(i,j)|
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace dbmc
