#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gurarij {

/// Coordinates of a point or functional in a finite-dimensional space.
using Vector = std::vector<double>;

/// Row-major dense matrix, used for linear maps between coordinate spaces.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vector apply(std::span<const double> x) const;
  Vector row(std::size_t r) const;
  Vector column(std::size_t c) const;
  Matrix transpose() const;

  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scale(std::span<const double> a, double s);
double norm_l1(std::span<const double> a);
double norm_linf(std::span<const double> a);
Vector unit_vector(std::size_t dim, std::size_t i);

/// Solves the square system a*x = b by Gaussian elimination with partial
/// pivoting. Returns nullopt when the matrix is singular to within `tol`.
std::optional<Vector> solve_square(Matrix a, Vector b, double tol = 1e-12);

/// Numerical rank by row reduction.
std::size_t rank(Matrix a, double tol = 1e-10);

}  // namespace gurarij
