#pragma once

// Chart arithmetic for the supported simply connected Lie groups.
//
// Every family is described in a fixed global chart:
//   Euclidean(d)   x in R^d, product is addition.
//   Aff2           (x, y) with x > 0, (x1,y1)(x2,y2) = (x1 x2, y2 + x2 y1).
//   Heisenberg     (x1,x2,x3), (x)(y) = (x1 + y1 + x2 y3, x2 + y2, x3 + y3).
//   Nilpotent      exponential coordinates of a nilpotent algebra given by
//                  structure constants; the product is the (finite) BCH series.

#include <Eigen/Dense>

#include <cmath>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liesys/errors.hpp"

namespace liesys {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coordinates of a Lie algebra element with respect to the model's basis.
struct AlgebraElement {
  Vector coords;

  AlgebraElement() = default;
  explicit AlgebraElement(Vector c) : coords(std::move(c)) {}
  AlgebraElement(std::initializer_list<double> c)
      : coords(Eigen::Map<const Vector>(c.begin(), static_cast<Eigen::Index>(c.size()))) {}

  [[nodiscard]] Eigen::Index size() const { return coords.size(); }
  double operator[](Eigen::Index i) const { return coords[i]; }
};

/// Coordinates of a group element in the model's global chart.
struct GroupElement {
  Vector coords;

  GroupElement() = default;
  explicit GroupElement(Vector c) : coords(std::move(c)) {}
  GroupElement(std::initializer_list<double> c)
      : coords(Eigen::Map<const Vector>(c.begin(), static_cast<Eigen::Index>(c.size()))) {}

  [[nodiscard]] Eigen::Index size() const { return coords.size(); }
  double operator[](Eigen::Index i) const { return coords[i]; }
};

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  return AlgebraElement(a.coords + b.coords);
}
inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  return AlgebraElement(a.coords - b.coords);
}
inline AlgebraElement operator*(double s, const AlgebraElement& a) {
  return AlgebraElement(s * a.coords);
}

enum class Family { Euclidean, Aff2, Heisenberg, Nilpotent };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::Euclidean: return "euclidean";
    case Family::Aff2: return "aff2";
    case Family::Heisenberg: return "heisenberg";
    case Family::Nilpotent: return "nilpotent";
  }
  return "?";
}

/// Structure constants c[i][j][k] with [e_i, e_j] = sum_k c[i][j][k] e_k.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int dim) : dim_(dim), c_(static_cast<size_t>(dim * dim * dim), 0.0) {}

  [[nodiscard]] int dim() const { return dim_; }
  double& operator()(int i, int j, int k) { return c_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return c_[index(i, j, k)]; }

  // Sets [e_i, e_j] = value * e_k and the antisymmetric partner.
  void set_bracket(int i, int j, int k, double value) {
    (*this)(i, j, k) = value;
    (*this)(j, i, k) = -value;
  }

  [[nodiscard]] Vector bracket(const Vector& x, const Vector& y) const {
    Vector out = Vector::Zero(dim_);
    for (int i = 0; i < dim_; ++i) {
      if (x[i] == 0.0) continue;
      for (int j = 0; j < dim_; ++j) {
        const double w = x[i] * y[j];
        if (w == 0.0) continue;
        for (int k = 0; k < dim_; ++k) out[k] += w * (*this)(i, j, k);
      }
    }
    return out;
  }

  [[nodiscard]] double antisymmetry_residual() const {
    double r = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) r = std::max(r, std::abs((*this)(i, j, k) + (*this)(j, i, k)));
    return r;
  }

  [[nodiscard]] double jacobi_residual() const {
    double r = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k) {
          const Vector ei = Vector::Unit(dim_, i), ej = Vector::Unit(dim_, j), ek = Vector::Unit(dim_, k);
          const Vector s = bracket(ei, bracket(ej, ek)) + bracket(ej, bracket(ek, ei)) +
                           bracket(ek, bracket(ei, ej));
          r = std::max(r, s.cwiseAbs().maxCoeff());
        }
    return r;
  }

  [[nodiscard]] const std::vector<double>& raw() const { return c_; }

  friend bool operator==(const StructureConstants&, const StructureConstants&) = default;

 private:
  [[nodiscard]] size_t index(int i, int j, int k) const {
    return static_cast<size_t>((i * dim_ + j) * dim_ + k);
  }

  int dim_ = 0;
  std::vector<double> c_;
};

namespace detail {

// Orthonormal basis (columns) of the span of the given columns.
inline Matrix span_basis(const Matrix& cols, double rel_tol = 1e-10) {
  if (cols.cols() == 0) return Matrix(cols.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * std::max(1.0, smax)) ++r;
  return svd.matrixU().leftCols(r);
}

// Length of the lower central series g = g_1 > g_2 > ... ; nullopt if it stalls above 0.
inline std::optional<int> nilpotency_step(const StructureConstants& c) {
  const int n = c.dim();
  if (n == 0) return 1;
  Matrix current = Matrix::Identity(n, n);
  for (int step = 1; step <= n; ++step) {
    Matrix next(n, n * current.cols());
    Eigen::Index col = 0;
    for (int i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < current.cols(); ++j)
        next.col(col++) = c.bracket(Vector::Unit(n, i), current.col(j));
    Matrix basis = span_basis(next);
    if (basis.cols() == 0) return step;
    if (basis.cols() == current.cols()) return std::nullopt;
    current = basis;
  }
  return std::nullopt;
}

}  // namespace detail

/// A concrete group family instance.
struct GroupModel {
  Family family = Family::Euclidean;
  int dim = 0;
  StructureConstants structure;
  // Length of the lower central series; empty for non-nilpotent algebras.
  std::optional<int> nilpotency_step;

  [[nodiscard]] GroupElement identity() const {
    GroupElement e(Vector::Zero(dim));
    if (family == Family::Aff2) e.coords[0] = 1.0;
    return e;
  }
  [[nodiscard]] AlgebraElement zero() const { return AlgebraElement(Vector::Zero(dim)); }
  [[nodiscard]] AlgebraElement basis(int i) const { return AlgebraElement(Vector::Unit(dim, i)); }

  static GroupModel euclidean(int d) {
    if (d < 1) throw ArgumentError("euclidean dimension must be positive");
    return GroupModel{Family::Euclidean, d, StructureConstants(d), 1};
  }

  static GroupModel aff2() {
    StructureConstants c(2);
    c.set_bracket(0, 1, 1, -1.0);  // [e1, e2] = -e2 in this chart
    return GroupModel{Family::Aff2, 2, std::move(c), std::nullopt};
  }

  static GroupModel heisenberg() {
    StructureConstants c(3);
    c.set_bracket(1, 2, 0, 1.0);  // [e2, e3] = e1
    return GroupModel{Family::Heisenberg, 3, std::move(c), 2};
  }

  // Nilpotent group in exponential coordinates. The BCH product is exact up to step 5.
  static GroupModel nilpotent(StructureConstants c) {
    if (c.dim() < 1) throw ModelError("structure constants must have positive dimension");
    if (c.antisymmetry_residual() > 0.0) throw ModelError("structure constants are not antisymmetric");
    if (c.jacobi_residual() > 1e-12) throw ModelError("structure constants violate the Jacobi identity");
    auto step = detail::nilpotency_step(c);
    if (!step) throw ModelError("lower central series does not terminate: algebra is not nilpotent");
    if (*step > 5) throw ModelError("nilpotency step " + std::to_string(*step) + " exceeds the supported maximum 5");
    const int d = c.dim();
    return GroupModel{Family::Nilpotent, d, std::move(c), step};
  }
};

inline bool is_finite(const Vector& v) { return v.allFinite(); }

inline void require_algebra(const GroupModel& m, const AlgebraElement& x) {
  if (x.size() != m.dim) throw DomainError("algebra element has wrong dimension");
  if (!is_finite(x.coords)) throw DomainError("algebra element has non-finite entries");
}

inline void require_group(const GroupModel& m, const GroupElement& g) {
  if (g.size() != m.dim) throw DomainError("group element has wrong dimension");
  if (!is_finite(g.coords)) throw DomainError("group element has non-finite entries");
  if (m.family == Family::Aff2 && !(g.coords[0] > 0.0))
    throw DomainError("Aff(2,R) chart requires a strictly positive first coordinate");
}

inline AlgebraElement bracket(const GroupModel& m, const AlgebraElement& x, const AlgebraElement& y) {
  require_algebra(m, x);
  require_algebra(m, y);
  if (m.family == Family::Euclidean) return m.zero();
  return AlgebraElement(m.structure.bracket(x.coords, y.coords));
}

/// Truncated Baker-Campbell-Hausdorff series log(exp X exp Y) through degree `order`.
///
/// Degrees 1..5 are implemented. For nilpotent models the series terminates at the
/// nilpotency step, so any order at or above the step is exact. Non-nilpotent models
/// only accept order <= 5 and the result is an approximation for small X, Y.
inline AlgebraElement bch(const GroupModel& m, const AlgebraElement& x, const AlgebraElement& y, int order) {
  if (order < 1) throw ArgumentError("bch order must be at least 1");
  require_algebra(m, x);
  require_algebra(m, y);
  if (order > 5) {
    if (!m.nilpotency_step || *m.nilpotency_step > 5)
      throw ArgumentError("bch terms beyond degree 5 are only available for nilpotent models of step <= 5");
    order = 5;
  }
  if (m.nilpotency_step) order = std::min(order, *m.nilpotency_step);

  const Vector& X = x.coords;
  const Vector& Y = y.coords;
  Vector z = X + Y;
  if (order < 2 || m.family == Family::Euclidean) return AlgebraElement(z);

  auto br = [&](const Vector& a, const Vector& b) { return m.structure.bracket(a, b); };
  const Vector xy = br(X, Y);
  z += 0.5 * xy;
  if (order < 3) return AlgebraElement(z);

  const Vector x_xy = br(X, xy);
  const Vector y_xy = br(Y, xy);
  z += (x_xy - y_xy) / 12.0;
  if (order < 4) return AlgebraElement(z);

  const Vector y_x_xy = br(Y, x_xy);
  z -= y_x_xy / 24.0;
  if (order < 5) return AlgebraElement(z);

  const Vector yx = -xy;
  const Vector yyyyx = br(Y, br(Y, br(Y, yx)));
  const Vector xxxxy = br(X, br(X, x_xy));
  const Vector xyyyx = br(X, br(Y, br(Y, yx)));
  const Vector yxxxy = br(Y, br(X, x_xy));
  const Vector yxyxy = br(Y, br(X, y_xy));
  const Vector xyxyx = br(X, br(Y, br(X, yx)));
  z += -(yyyyx + xxxxy) / 720.0 + (xyyyx + yxxxy) / 360.0 + (yxyxy + xyxyx) / 120.0;
  return AlgebraElement(z);
}

namespace detail {

// (e^a - 1) / a with a series branch near zero.
inline double expm1_over(double a) {
  if (std::abs(a) < 1e-6) return 1.0 + a / 2.0 + a * a / 6.0;
  return std::expm1(a) / a;
}

// a / (e^a - 1), the reciprocal of expm1_over.
inline double over_expm1(double a) {
  if (std::abs(a) < 1e-6) return 1.0 - a / 2.0 + a * a / 12.0;
  return a / std::expm1(a);
}

}  // namespace detail

inline GroupElement exp(const GroupModel& m, const AlgebraElement& x) {
  require_algebra(m, x);
  const Vector& a = x.coords;
  switch (m.family) {
    case Family::Euclidean:
    case Family::Nilpotent:
      return GroupElement(a);
    case Family::Aff2:
      return GroupElement{std::exp(a[0]), a[1] * detail::expm1_over(a[0])};
    case Family::Heisenberg:
      return GroupElement{a[0] + 0.5 * a[1] * a[2], a[1], a[2]};
  }
  throw ModelError("unknown family");
}

inline AlgebraElement log(const GroupModel& m, const GroupElement& g) {
  require_group(m, g);
  const Vector& x = g.coords;
  switch (m.family) {
    case Family::Euclidean:
    case Family::Nilpotent:
      return AlgebraElement(x);
    case Family::Aff2: {
      const double alpha = std::log(x[0]);
      return AlgebraElement{alpha, x[1] * detail::over_expm1(alpha)};
    }
    case Family::Heisenberg:
      return AlgebraElement{x[0] - 0.5 * x[1] * x[2], x[1], x[2]};
  }
  throw ModelError("unknown family");
}

inline GroupElement mul(const GroupModel& m, const GroupElement& g, const GroupElement& h) {
  require_group(m, g);
  require_group(m, h);
  const Vector& x = g.coords;
  const Vector& y = h.coords;
  switch (m.family) {
    case Family::Euclidean:
      return GroupElement(x + y);
    case Family::Aff2:
      return GroupElement{x[0] * y[0], y[1] + y[0] * x[1]};
    case Family::Heisenberg:
      return GroupElement{x[0] + y[0] + x[1] * y[2], x[1] + y[1], x[2] + y[2]};
    case Family::Nilpotent:
      return GroupElement(bch(m, AlgebraElement(x), AlgebraElement(y), *m.nilpotency_step).coords);
  }
  throw ModelError("unknown family");
}

inline GroupElement inv(const GroupModel& m, const GroupElement& g) {
  require_group(m, g);
  const Vector& x = g.coords;
  switch (m.family) {
    case Family::Euclidean:
    case Family::Nilpotent:
      return GroupElement(-x);
    case Family::Aff2:
      return GroupElement{1.0 / x[0], -x[1] / x[0]};
    case Family::Heisenberg:
      return GroupElement{-x[0] + x[1] * x[2], -x[1], -x[2]};
  }
  throw ModelError("unknown family");
}

/// Max-norm distance between two chart points.
inline double chart_distance(const GroupElement& a, const GroupElement& b) {
  return (a.coords - b.coords).cwiseAbs().maxCoeff();
}

}  // namespace liesys
