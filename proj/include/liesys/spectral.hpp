#pragma once

// Differential of the system automorphism at the identity and the splitting of the
// Lie algebra into unstable, center and stable generalized eigenspaces.

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "liesys/errors.hpp"
#include "liesys/lie_core.hpp"
#include "liesys/random.hpp"

namespace liesys {

using ChartMap = std::function<GroupElement(const GroupElement&)>;

/// The automorphism f_0 as a pair of chart maps, with its differential when known in closed form.
struct Automorphism {
  ChartMap forward;
  ChartMap inverse;
  std::optional<Matrix> differential;

  GroupElement operator()(const GroupElement& g) const { return forward(g); }

  [[nodiscard]] Automorphism inverted() const {
    Automorphism out{inverse, forward, std::nullopt};
    if (differential) out.differential = differential->inverse();
    return out;
  }

  static Automorphism identity() {
    ChartMap id = [](const GroupElement& g) { return g; };
    return {id, id, std::nullopt};
  }

  static Automorphism euclidean(const Matrix& a) {
    if (a.rows() != a.cols()) throw ArgumentError("automorphism matrix must be square");
    Eigen::FullPivLU<Matrix> lu(a);
    if (std::abs(a.determinant()) < 1e-12 || !lu.isInvertible())
      throw ArgumentError("automorphism matrix is singular");
    Matrix a_inv = lu.inverse();
    return {[a](const GroupElement& g) { return GroupElement(a * g.coords); },
            [a_inv](const GroupElement& g) { return GroupElement(a_inv * g.coords); }, a};
  }

  // phi(x, y) = (x, a (x - 1) + d y).
  static Automorphism aff2(double a, double d) {
    if (d == 0.0) throw ArgumentError("Aff(2,R) automorphism needs d != 0");
    Matrix df(2, 2);
    df << 1.0, 0.0, a, d;
    return {[a, d](const GroupElement& g) {
              return GroupElement{g[0], a * (g[0] - 1.0) + d * g[1]};
            },
            [a, d](const GroupElement& g) {
              return GroupElement{g[0], -a / d * (g[0] - 1.0) + g[1] / d};
            },
            df};
  }

  // exp o L o log for a Lie algebra automorphism L; valid on every simply connected family.
  static Automorphism from_algebra_matrix(const GroupModel& m, const Matrix& l) {
    if (l.rows() != m.dim || l.cols() != m.dim) throw ArgumentError("algebra matrix has wrong size");
    Eigen::FullPivLU<Matrix> lu(l);
    if (!lu.isInvertible()) throw ArgumentError("algebra matrix is singular");
    Matrix l_inv = lu.inverse();
    return {[m, l](const GroupElement& g) { return exp(m, AlgebraElement(l * log(m, g).coords)); },
            [m, l_inv](const GroupElement& g) { return exp(m, AlgebraElement(l_inv * log(m, g).coords)); },
            l};
  }
};

/// Residuals of the defining properties of an automorphism on random samples.
struct AutomorphismReport {
  double identity_residual = 0.0;
  double homomorphism_residual = 0.0;
  double inverse_residual = 0.0;
  bool ok = false;
};

inline AutomorphismReport check_automorphism(const GroupModel& m, const Automorphism& aut,
                                             std::uint64_t seed = kDefaultSeed, int samples = 50) {
  AutomorphismReport rep;
  const GroupElement e = m.identity();
  rep.identity_residual = chart_distance(aut(e), e);
  Rng rng(seed);
  for (int i = 0; i < samples; ++i) {
    const GroupElement g = random_group(m, rng), h = random_group(m, rng);
    rep.homomorphism_residual =
        std::max(rep.homomorphism_residual, chart_distance(aut(mul(m, g, h)), mul(m, aut(g), aut(h))));
    rep.inverse_residual = std::max(rep.inverse_residual, chart_distance(aut.inverse(aut(g)), g));
  }
  rep.ok = rep.identity_residual <= 1e-12 && rep.homomorphism_residual <= 1e-10 && rep.inverse_residual <= 1e-10;
  return rep;
}

/// Matrix of d(f_0)_e in the chart basis of the algebra.
///
/// Uses the closed form when the automorphism carries one, otherwise central differences
/// of log o f_0 o exp at zero with step 1e-6.
inline Matrix differential_at_identity(const GroupModel& m, const Automorphism& aut) {
  Matrix df;
  if (aut.differential) {
    df = *aut.differential;
  } else {
    constexpr double h = 1e-6;
    df.resize(m.dim, m.dim);
    for (int i = 0; i < m.dim; ++i) {
      const AlgebraElement step(h * Vector::Unit(m.dim, i));
      const Vector plus = log(m, aut(exp(m, step))).coords;
      const Vector minus = log(m, aut(exp(m, -1.0 * step))).coords;
      df.col(i) = (plus - minus) / (2.0 * h);
    }
  }
  if (df.rows() != m.dim || df.cols() != m.dim) throw ModelError("differential has wrong size");
  if (std::abs(df.determinant()) < 1e-12) throw ModelError("differential is singular: f_0 is not an automorphism");
  return df;
}

enum class Block { Plus, Zero, Minus };

/// Generalized eigenspace splitting g = g+ (+) g0 (+) g-.
struct SpectralSplit {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<Block> assignment;  // block of each eigenvalue, same order
  Matrix basis_plus;              // orthonormal columns
  Matrix basis_zero;
  Matrix basis_minus;
  double tol = 1e-9;
  // Some eigenvalue sits inside [1 - tol, 1 + tol] without being numerically on the unit circle.
  bool boundary_warning = false;

  [[nodiscard]] int dim() const { return static_cast<int>(eigenvalues.size()); }
  [[nodiscard]] int dim_plus() const { return static_cast<int>(basis_plus.cols()); }
  [[nodiscard]] int dim_zero() const { return static_cast<int>(basis_zero.cols()); }
  [[nodiscard]] int dim_minus() const { return static_cast<int>(basis_minus.cols()); }

  [[nodiscard]] const Matrix& basis(Block b) const {
    switch (b) {
      case Block::Plus: return basis_plus;
      case Block::Zero: return basis_zero;
      case Block::Minus: return basis_minus;
    }
    return basis_zero;
  }

  // Center-unstable sum g+ (+) g0.
  [[nodiscard]] Matrix center_unstable() const { return concat_orthonormal(basis_plus, basis_zero); }
  // Center-stable sum g- (+) g0.
  [[nodiscard]] Matrix center_stable() const { return concat_orthonormal(basis_minus, basis_zero); }

  [[nodiscard]] std::vector<double> moduli() const {
    std::vector<double> out;
    for (const auto& e : eigenvalues) out.push_back(std::abs(e));
    return out;
  }

 private:
  static Matrix concat_orthonormal(const Matrix& a, const Matrix& b) {
    Matrix m(a.rows(), a.cols() + b.cols());
    m << a, b;
    if (m.cols() == 0) return m;
    Eigen::HouseholderQR<Matrix> qr(m);
    return qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  }
};

namespace detail {

struct SchurResult {
  Matrix vectors;
  std::vector<std::complex<double>> eigenvalues;
  int selected = 0;
};

// Selection predicate handed to dgees; LAPACK offers no user pointer, so it is thread-local.
inline thread_local const std::function<bool(double, double)>* schur_select = nullptr;

inline lapack_logical schur_select_trampoline(const double* re, const double* im) {
  return (*schur_select)(*re, *im) ? 1 : 0;
}

inline SchurResult real_schur(const Matrix& l, const std::function<bool(double, double)>* select) {
  const lapack_int n = static_cast<lapack_int>(l.rows());
  Matrix a = l;
  SchurResult out;
  out.vectors.resize(n, n);
  std::vector<double> wr(static_cast<size_t>(n)), wi(static_cast<size_t>(n));
  lapack_int sdim = 0;
  schur_select = select;
  const lapack_int info =
      LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', select ? 'S' : 'N', select ? schur_select_trampoline : nullptr, n,
                    a.data(), n, &sdim, wr.data(), wi.data(), out.vectors.data(), n);
  schur_select = nullptr;
  if (info != 0) throw NumericalError("real Schur decomposition failed (dgees info " + std::to_string(info) + ")");
  for (lapack_int i = 0; i < n; ++i) out.eigenvalues.emplace_back(wr[static_cast<size_t>(i)], wi[static_cast<size_t>(i)]);
  out.selected = static_cast<int>(sdim);
  return out;
}

// Replaces each eigenvalue's modulus by the mean modulus of its cluster. A defective
// eigenvalue is computed as a ring of perturbed values whose mean is well conditioned.
inline std::vector<double> clustered_moduli(const std::vector<std::complex<double>>& ev, double radius) {
  const size_t n = ev.size();
  std::vector<size_t> parent(n);
  std::iota(parent.begin(), parent.end(), size_t{0});
  std::function<size_t(size_t)> find = [&](size_t i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (std::abs(ev[i] - ev[j]) <= radius) parent[find(i)] = find(j);
  std::vector<double> sum(n, 0.0), count(n, 0.0), out(n);
  for (size_t i = 0; i < n; ++i) {
    sum[find(i)] += std::abs(ev[i]);
    count[find(i)] += 1.0;
  }
  for (size_t i = 0; i < n; ++i) out[i] = sum[find(i)] / count[find(i)];
  return out;
}

}  // namespace detail

/// Splits R^n into the generalized eigenspace sums of L with |alpha| > 1 + tol, inside the
/// band, and |alpha| < 1 - tol. Each block is returned with an orthonormal basis obtained
/// from a reordered real Schur form, so complex pairs are handled over the reals.
inline SpectralSplit eigensplit(const Matrix& l, double tol = 1e-9) {
  if (l.rows() != l.cols()) throw ArgumentError("eigensplit needs a square matrix");
  if (!(tol > 0.0 && tol < 0.5)) throw ArgumentError("eigensplit tolerance must lie in (0, 0.5)");
  if (!l.allFinite()) throw ArgumentError("eigensplit matrix has non-finite entries");
  const int n = static_cast<int>(l.rows());

  SpectralSplit split;
  split.tol = tol;
  if (n == 0) return split;
  if (std::abs(l.determinant()) == 0.0) throw ArgumentError("eigensplit needs an invertible matrix");

  const detail::SchurResult plain = detail::real_schur(l, nullptr);
  split.eigenvalues = plain.eigenvalues;
  const double radius = 1e-5 * std::max(1.0, l.cwiseAbs().maxCoeff());
  const std::vector<double> mod = detail::clustered_moduli(plain.eigenvalues, radius);

  auto classify = [tol](double modulus) {
    if (modulus > 1.0 + tol) return Block::Plus;
    if (modulus < 1.0 - tol) return Block::Minus;
    return Block::Zero;
  };
  int expected[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const Block b = classify(mod[static_cast<size_t>(i)]);
    split.assignment.push_back(b);
    ++expected[static_cast<int>(b)];
    const double off = std::abs(std::abs(plain.eigenvalues[static_cast<size_t>(i)]) - 1.0);
    if (b == Block::Zero && off > 1e3 * std::numeric_limits<double>::epsilon()) split.boundary_warning = true;
  }

  auto block_basis = [&](Block target) -> Matrix {
    const int want = expected[static_cast<int>(target)];
    if (want == 0) return Matrix(n, 0);
    if (want == n) return Matrix::Identity(n, n);
    // Reordering perturbs eigenvalues slightly; classify each by its nearest original eigenvalue.
    const std::function<bool(double, double)> select = [&](double re, double im) {
      const std::complex<double> z(re, im);
      size_t best = 0;
      for (size_t i = 1; i < plain.eigenvalues.size(); ++i)
        if (std::abs(plain.eigenvalues[i] - z) < std::abs(plain.eigenvalues[best] - z)) best = i;
      return split.assignment[best] == target;
    };
    const detail::SchurResult ordered = detail::real_schur(l, &select);
    if (ordered.selected != want)
      throw NumericalError("Schur reordering selected " + std::to_string(ordered.selected) + " eigenvalues, expected " +
                           std::to_string(want));
    return ordered.vectors.leftCols(want);
  };
  split.basis_plus = block_basis(Block::Plus);
  split.basis_zero = block_basis(Block::Zero);
  split.basis_minus = block_basis(Block::Minus);
  return split;
}

/// Max-norm of the component of `vectors` orthogonal to span(basis); basis orthonormal.
inline double span_residual(const Matrix& basis, const Matrix& vectors) {
  if (vectors.cols() == 0 || vectors.rows() == 0) return 0.0;
  Matrix r = vectors;
  if (basis.cols() > 0) r -= basis * (basis.transpose() * vectors);
  return r.cwiseAbs().maxCoeff();
}

/// Residual of L-invariance of span(basis).
inline double invariance_residual(const Matrix& l, const Matrix& basis) { return span_residual(basis, l * basis); }

/// Bracket closure of the blocks of a split.
struct ClosureReport {
  double plus_residual = 0.0;       // [g+, g+] in g+
  double zero_residual = 0.0;       // [g0, g0] in g0
  double minus_residual = 0.0;      // [g-, g-] in g-
  double plus_zero_residual = 0.0;  // [g+, g0] in g+
  double minus_zero_residual = 0.0; // [g-, g0] in g-
  bool plus_subalgebra = false;
  bool zero_subalgebra = false;
  bool minus_subalgebra = false;
  bool plus_ideal_in_center_unstable = false;
  bool minus_ideal_in_center_stable = false;
  double tol = 1e-9;
};

inline ClosureReport closure_check(const GroupModel& m, const SpectralSplit& split, double tol = 1e-9) {
  auto brackets = [&](const Matrix& a, const Matrix& b) {
    Matrix out(m.dim, a.cols() * b.cols());
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < a.cols(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        out.col(c++) = bracket(m, AlgebraElement(Vector(a.col(i))), AlgebraElement(Vector(b.col(j)))).coords;
    return out;
  };
  ClosureReport rep;
  rep.tol = tol;
  rep.plus_residual = span_residual(split.basis_plus, brackets(split.basis_plus, split.basis_plus));
  rep.zero_residual = span_residual(split.basis_zero, brackets(split.basis_zero, split.basis_zero));
  rep.minus_residual = span_residual(split.basis_minus, brackets(split.basis_minus, split.basis_minus));
  rep.plus_zero_residual = span_residual(split.basis_plus, brackets(split.basis_plus, split.basis_zero));
  rep.minus_zero_residual = span_residual(split.basis_minus, brackets(split.basis_minus, split.basis_zero));
  rep.plus_subalgebra = rep.plus_residual <= tol;
  rep.zero_subalgebra = rep.zero_residual <= tol;
  rep.minus_subalgebra = rep.minus_residual <= tol;
  rep.plus_ideal_in_center_unstable = rep.plus_subalgebra && rep.plus_zero_residual <= tol;
  rep.minus_ideal_in_center_stable = rep.minus_subalgebra && rep.minus_zero_residual <= tol;
  return rep;
}

/// Whether a surjective homomorphism pi maps each block of one split into the matching block of another.
struct EquivarianceReport {
  double commutation_residual = 0.0;
  Matrix dpi;
  double plus_residual = 0.0;
  double zero_residual = 0.0;
  double minus_residual = 0.0;
  bool ok = false;
};

inline EquivarianceReport equivariance_check(const GroupModel& m, const Automorphism& aut, const ChartMap& pi,
                                             const GroupModel& m2, const Automorphism& aut2, double tol = 1e-9,
                                             std::uint64_t seed = kDefaultSeed) {
  EquivarianceReport rep;
  Rng rng(seed);
  for (int i = 0; i < 50; ++i) {
    const GroupElement g = random_group(m, rng);
    rep.commutation_residual = std::max(rep.commutation_residual, chart_distance(pi(aut(g)), aut2(pi(g))));
  }
  if (rep.commutation_residual > 1e-10)
    throw PreconditionError("pi o f_0 differs from f_0' o pi by " + std::to_string(rep.commutation_residual));

  constexpr double h = 1e-6;
  rep.dpi.resize(m2.dim, m.dim);
  for (int i = 0; i < m.dim; ++i) {
    const AlgebraElement step(h * Vector::Unit(m.dim, i));
    const Vector plus = log(m2, pi(exp(m, step))).coords;
    const Vector minus = log(m2, pi(exp(m, -1.0 * step))).coords;
    rep.dpi.col(i) = (plus - minus) / (2.0 * h);
  }

  const double split_tol = (aut.differential && aut2.differential) ? 1e-9 : 1e-6;
  const SpectralSplit s1 = eigensplit(differential_at_identity(m, aut), split_tol);
  const SpectralSplit s2 = eigensplit(differential_at_identity(m2, aut2), split_tol);
  rep.plus_residual = span_residual(s2.basis_plus, rep.dpi * s1.basis_plus);
  rep.zero_residual = span_residual(s2.basis_zero, rep.dpi * s1.basis_zero);
  rep.minus_residual = span_residual(s2.basis_minus, rep.dpi * s1.basis_minus);
  rep.ok = rep.plus_residual <= tol && rep.zero_residual <= tol && rep.minus_residual <= tol;
  return rep;
}

}  // namespace liesys
