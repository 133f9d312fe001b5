#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mgc {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Sizes here are tiny (2n ≤ a few dozen),
/// so no expression templates or blocking.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  Vector col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);

  Matrix transpose() const;
  /// Rows [first, first+count) as a new matrix.
  Matrix row_block(std::size_t first, std::size_t count) const;
  /// Columns [first, first+count) as a new matrix.
  Matrix col_block(std::size_t first, std::size_t count) const;

  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, std::span<const double> x);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// Entrywise absolute value.
Matrix abs(const Matrix& a);
Vector abs(std::span<const double> v);

/// Induced infinity norm (max absolute row sum).
double norm_inf(const Matrix& a);
double norm_inf(std::span<const double> v);
/// Largest absolute entry.
double max_abs(const Matrix& a);

double trace(const Matrix& a);

}  // namespace mgc
