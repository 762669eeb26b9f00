#pragma once

// Independent references: matrix groups and power series, no library arithmetic.

#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "liesys/lie_core.hpp"

namespace oracle {

using liesys::Matrix;
using liesys::Vector;

// [[1, x2, x1], [0, 1, x3], [0, 0, 1]]
inline Matrix heis_matrix(const Vector& x) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = x[1];
  m(0, 2) = x[0];
  m(1, 2) = x[2];
  return m;
}

inline Vector heis_coords(const Matrix& m) { return Vector{{m(0, 2), m(0, 1), m(1, 2)}}; }

inline Matrix heis_algebra(const Vector& a) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = a[1];
  m(0, 2) = a[0];
  m(1, 2) = a[2];
  return m;
}

// [[x, 0], [y, 1]]
inline Matrix aff_matrix(const Vector& g) {
  Matrix m(2, 2);
  m << g[0], 0.0, g[1], 1.0;
  return m;
}

inline Vector aff_coords(const Matrix& m) { return Vector{{m(0, 0), m(1, 0)}}; }

inline Matrix aff_algebra(const Vector& a) {
  Matrix m(2, 2);
  m << a[0], 0.0, a[1], 0.0;
  return m;
}

inline Vector aff_algebra_coords(const Matrix& m) { return Vector{{m(0, 0), m(1, 0)}}; }

// Finite series for nilpotent matrices.
inline Matrix nil_exp(const Matrix& a) {
  Matrix out = Matrix::Identity(a.rows(), a.cols()), term = out;
  for (int k = 1; k <= a.rows(); ++k) {
    term = term * a / static_cast<double>(k);
    out += term;
  }
  return out;
}

inline Matrix nil_log(const Matrix& g) {
  const Matrix n = g - Matrix::Identity(g.rows(), g.cols());
  Matrix out = Matrix::Zero(g.rows(), g.cols()), p = Matrix::Identity(g.rows(), g.cols());
  for (int k = 1; k <= g.rows(); ++k) {
    p = p * n;
    out += ((k % 2) ? 1.0 : -1.0) * p / static_cast<double>(k);
  }
  return out;
}

// Strictly upper triangular n x n matrices with basis E_ij (i < j) in row-major order.
struct UpperTriangular {
  int n = 0;
  std::vector<std::pair<int, int>> basis;

  explicit UpperTriangular(int size) : n(size) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) basis.emplace_back(i, j);
  }

  [[nodiscard]] int dim() const { return static_cast<int>(basis.size()); }

  [[nodiscard]] Matrix to_matrix(const Vector& c) const {
    Matrix m = Matrix::Zero(n, n);
    for (int b = 0; b < dim(); ++b) m(basis[b].first, basis[b].second) = c[b];
    return m;
  }

  [[nodiscard]] Vector to_coords(const Matrix& m) const {
    Vector c(dim());
    for (int b = 0; b < dim(); ++b) c[b] = m(basis[b].first, basis[b].second);
    return c;
  }

  // Structure constants read off from matrix commutators.
  [[nodiscard]] liesys::StructureConstants constants() const {
    liesys::StructureConstants c(dim());
    for (int a = 0; a < dim(); ++a)
      for (int b = 0; b < dim(); ++b) {
        const Matrix ea = to_matrix(Vector::Unit(dim(), a)), eb = to_matrix(Vector::Unit(dim(), b));
        const Vector br = to_coords(ea * eb - eb * ea);
        for (int k = 0; k < dim(); ++k) c(a, b, k) = br[k];
      }
    return c;
  }

  // log(exp X exp Y) computed with matrices.
  [[nodiscard]] Vector bch(const Vector& x, const Vector& y) const {
    return to_coords(nil_log(nil_exp(to_matrix(x)) * nil_exp(to_matrix(y))));
  }
};

}  // namespace oracle
