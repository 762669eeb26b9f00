#pragma once

// Control vector fields, their adjoint transports and rank tests for accessibility
// and for openness of the reachable set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "liesys/errors.hpp"
#include "liesys/lie_core.hpp"
#include "liesys/random.hpp"
#include "liesys/system.hpp"

namespace liesys {

inline constexpr double kControlStep = 1e-5;   // d/dv of control-parametrized maps
inline constexpr double kJacobianStep = 1e-6;  // state Jacobians and solution-map Jacobians
inline constexpr double kRankTol = 1e-7;

struct TangentVector {
  GroupElement base;
  Vector vec;
};

enum class Direction { Plus, Minus };

struct RankReport {
  int rank = 0;
  int dim = 0;
  std::vector<double> singular_values;
  int vectors_used = 0;
  bool accessible = false;
  // A deficient rank found from finitely many samples does not prove inaccessibility.
  bool heuristic_negative = false;
  double tol = kRankTol;
};

/// Numerical rank of the column span, relative threshold tol * sigma_max.
inline RankReport rank_of_columns(const Matrix& cols, double tol = kRankTol) {
  RankReport rep;
  rep.dim = static_cast<int>(cols.rows());
  rep.vectors_used = static_cast<int>(cols.cols());
  rep.tol = tol;
  if (cols.cols() > 0 && cols.rows() > 0) {
    Eigen::JacobiSVD<Matrix> svd(cols);
    const Vector s = svd.singularValues();
    rep.singular_values.assign(s.data(), s.data() + s.size());
    const double smax = s.size() > 0 ? s[0] : 0.0;
    if (smax > 1e-14)
      for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > tol * smax) ++rep.rank;
  }
  rep.accessible = rep.rank == rep.dim;
  rep.heuristic_negative = !rep.accessible;
  return rep;
}

namespace detail {

inline void require_interior(const LinearSystem& sys, const Vector& u) {
  if (u.size() != sys.channels()) throw ArgumentError("control has wrong number of channels");
  if (!sys.range.interior(u)) throw PreconditionError("control must lie strictly inside U");
}

// Central differences of w -> F(w) at u, one column per control channel.
template <class F>
Matrix control_derivative(F&& f, const Vector& u, double h) {
  Matrix out;
  for (Eigen::Index c = 0; c < u.size(); ++c) {
    Vector up = u, um = u;
    up[c] += h;
    um[c] -= h;
    const Vector col = (f(up).coords - f(um).coords) / (2.0 * h);
    if (out.size() == 0) out.resize(col.size(), u.size());
    out.col(c) = col;
  }
  return out;
}

// Central differences of a chart map at x.
template <class F>
Matrix state_jacobian(F&& f, const GroupElement& x, double h) {
  const Eigen::Index n = x.size();
  Matrix j(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    GroupElement xp = x, xm = x;
    xp.coords[i] += h;
    xm.coords[i] -= h;
    j.col(i) = (f(xp).coords - f(xm).coords) / (2.0 * h);
  }
  return j;
}

inline std::vector<TangentVector> split_columns(const GroupElement& base, const Matrix& m) {
  std::vector<TangentVector> out;
  for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({base, m.col(c)});
  return out;
}

}  // namespace detail

/// X+_u(x) = d/dv|_0 f_u^{-1} o f_{u+v}(x), one tangent vector per control channel.
inline std::vector<TangentVector> x_plus(const LinearSystem& sys, const Vector& u, const GroupElement& x) {
  detail::require_interior(sys, u);
  require_group(sys.model, x);
  const Matrix d = detail::control_derivative(
      [&](const Vector& w) { return sys.apply_inverse(sys.apply(x, w), u); }, u, kControlStep);
  return detail::split_columns(x, d);
}

/// X-_u(x) = d/dv|_0 f_u o f_{u+v}^{-1}(x).
inline std::vector<TangentVector> x_minus(const LinearSystem& sys, const Vector& u, const GroupElement& x) {
  detail::require_interior(sys, u);
  require_group(sys.model, x);
  const Matrix d = detail::control_derivative(
      [&](const Vector& w) { return sys.apply(sys.apply_inverse(x, w), u); }, u, kControlStep);
  return detail::split_columns(x, d);
}

/// Transport of X+_{u0} (or X-_{u0}) by the chain of outer controls u_1..u_k.
///
/// Plus:  (dF)_x^{-1} X+_{u0}(F(x)) with F = f_{u_k} o ... o f_{u_1}.
/// Minus: (dF)_x^{-1} X-_{u0}(F(x)) with F = f_{u_k}^{-1} o ... o f_{u_1}^{-1}.
/// The empty chain returns the raw field.
inline std::vector<TangentVector> ad_chain(const LinearSystem& sys, Direction dir, const ControlSequence& outer,
                                           const Vector& u0, const GroupElement& x) {
  for (const auto& u : outer) detail::require_interior(sys, u);
  detail::require_interior(sys, u0);
  require_group(sys.model, x);

  auto compose = [&](const GroupElement& p) {
    GroupElement q = p;
    for (const auto& u : outer) q = dir == Direction::Plus ? sys.apply(q, u) : sys.apply_inverse(q, u);
    return q;
  };
  const GroupElement y = compose(x);
  const auto fields = dir == Direction::Plus ? x_plus(sys, u0, y) : x_minus(sys, u0, y);
  if (outer.empty()) {
    std::vector<TangentVector> out;
    for (const auto& f : fields) out.push_back({x, f.vec});
    return out;
  }
  const Matrix j = detail::state_jacobian(compose, x, kJacobianStep);
  if (std::abs(j.determinant()) < 1e-10) throw NumericalError("chain Jacobian is singular");
  const Eigen::PartialPivLU<Matrix> lu(j);
  std::vector<TangentVector> out;
  for (const auto& f : fields) out.push_back({x, lu.solve(f.vec)});
  return out;
}

struct GammaOptions {
  int depth = 3;
  int samples = 8;
  double tol = kRankTol;
  std::uint64_t seed = kDefaultSeed;
};

/// Control values {0, lo/2, hi/2} per channel, combined over channels.
inline std::vector<Vector> control_lattice(const ControlRange& range) {
  std::vector<Vector> out{Vector::Zero(range.channels())};
  for (int c = 0; c < range.channels(); ++c) {
    std::vector<Vector> next;
    for (const auto& base : out)
      for (double v : {0.0, range.lo()[c] / 2.0, range.hi()[c] / 2.0}) {
        Vector u = base;
        u[c] = v;
        next.push_back(u);
      }
    out = std::move(next);
  }
  return out;
}

inline Vector random_interior_control(const ControlRange& range, Rng& rng) {
  Vector u(range.channels());
  for (int c = 0; c < range.channels(); ++c) u[c] = uniform(rng, 0.9 * range.lo()[c], 0.9 * range.hi()[c]);
  return u;
}

/// Rank of the span of adjoint chains of X+ (or X-) at x, over chain lengths 0..depth.
///
/// Every chain over the lattice {0, +-rho/2} is used while the count stays small, the all-zero
/// chain always, plus `samples` pseudo-random chains per length.
inline RankReport gamma_rank(const LinearSystem& sys, const GroupElement& x, const GammaOptions& opt = {},
                             Direction dir = Direction::Plus) {
  if (opt.depth < 1) throw ArgumentError("gamma_rank depth must be at least 1");
  require_group(sys.model, x);
  const std::vector<Vector> lattice = control_lattice(sys.range);
  Rng rng(opt.seed);
  std::vector<Vector> cols;

  auto add_chain = [&](const std::vector<Vector>& controls) {
    const Vector& u0 = controls.front();
    const ControlSequence outer(controls.begin() + 1, controls.end());
    for (const auto& t : ad_chain(sys, dir, outer, u0, x)) cols.push_back(t.vec);
  };

  for (int k = 0; k <= opt.depth; ++k) {
    const double combos = std::pow(static_cast<double>(lattice.size()), k + 1);
    if (combos <= 729.0) {
      std::vector<size_t> idx(static_cast<size_t>(k + 1), 0);
      while (true) {
        std::vector<Vector> controls;
        for (size_t i : idx) controls.push_back(lattice[i]);
        add_chain(controls);
        size_t p = 0;
        while (p < idx.size() && ++idx[p] == lattice.size()) idx[p++] = 0;
        if (p == idx.size()) break;
      }
    } else {
      add_chain(std::vector<Vector>(static_cast<size_t>(k + 1), Vector::Zero(sys.channels())));
    }
    for (int s = 0; s < opt.samples; ++s) {
      std::vector<Vector> controls;
      for (int j = 0; j <= k; ++j) controls.push_back(random_interior_control(sys.range, rng));
      add_chain(controls);
    }
  }
  Matrix m(sys.model.dim, static_cast<Eigen::Index>(cols.size()));
  for (size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
  return rank_of_columns(m, opt.tol);
}

/// Accessibility criterion for f_u(x, y) = (h(u) x, a (x - 1) + d y + g(u) x):
/// h'(0) != 0 and -a h'(0) != g'(0) (d - 1).
inline bool aff2_accessible(double a, double d, double hp0, double gp0) {
  if (d == 0.0) throw ArgumentError("d must be nonzero for an automorphism of Aff(2,R)");
  return std::abs(hp0) > 1e-12 && std::abs(-a * hp0 - gp0 * (d - 1.0)) > 1e-12;
}

struct RegularPairReport {
  RankReport rank;
  Matrix jacobian;
  GroupElement endpoint;
};

/// Rank of d/du phi(k, g, u) at the given strictly interior control sequence.
inline RegularPairReport regular_pair_rank(const LinearSystem& sys, const GroupElement& g, const ControlSequence& useq,
                                           double tol = kRankTol) {
  for (const auto& u : useq) detail::require_interior(sys, u);
  require_group(sys.model, g);
  const int m = sys.channels();
  const int k = static_cast<int>(useq.size());
  auto run = [&](const ControlSequence& w) {
    GroupElement x = g;
    for (const auto& u : w) x = sys.apply(x, u);
    return x;
  };
  RegularPairReport rep;
  rep.endpoint = run(useq);
  rep.jacobian.resize(sys.model.dim, k * m);
  ControlSequence w = useq;
  for (int j = 0; j < k; ++j)
    for (int c = 0; c < m; ++c) {
      const double keep = w[static_cast<size_t>(j)][c];
      w[static_cast<size_t>(j)][c] = keep + kJacobianStep;
      const Vector fp = run(w).coords;
      w[static_cast<size_t>(j)][c] = keep - kJacobianStep;
      const Vector fm = run(w).coords;
      w[static_cast<size_t>(j)][c] = keep;
      rep.jacobian.col(j * m + c) = (fp - fm) / (2.0 * kJacobianStep);
    }
  rep.rank = rank_of_columns(rep.jacobian, tol);
  return rep;
}

enum class Openness { Proven, HeuristicNo, Unknown };

inline const char* to_string(Openness o) {
  switch (o) {
    case Openness::Proven: return "proven";
    case Openness::HeuristicNo: return "heuristic_no";
    case Openness::Unknown: return "unknown";
  }
  return "?";
}

/// A regular control sequence steering e back to e, which places e in the interior of R.
struct OpennessWitness {
  Openness status = Openness::Unknown;
  ControlSequence controls;
  double endpoint_residual = 0.0;
  RankReport rank;
};

struct OpennessOptions {
  int max_k = 0;  // 0 selects 2 * dim
  int newton_trials = 24;
  double tol = kRankTol;
  std::uint64_t seed = kDefaultSeed;
};

namespace detail {

// Damped Gauss-Newton on w -> phi(k, e, w) = e with minimal-norm steps, kept inside U.
inline std::optional<ControlSequence> project_to_return(const LinearSystem& sys, ControlSequence w) {
  const GroupElement e = sys.model.identity();
  const int m = sys.channels();
  auto residual = [&](const ControlSequence& v) {
    GroupElement x = e;
    for (const auto& u : v) x = sys.apply(x, u);
    return Vector(x.coords - e.coords);
  };
  for (const auto& u : w)
    if (!sys.range.interior(u)) return std::nullopt;
  for (int it = 0; it < 80; ++it) {
    const RegularPairReport rp = regular_pair_rank(sys, e, w);
    const Vector r = rp.endpoint.coords - e.coords;
    const double norm = r.norm();
    if (r.cwiseAbs().maxCoeff() <= 1e-14) return w;
    const Vector delta = rp.jacobian.completeOrthogonalDecomposition().solve(-r);
    if (!delta.allFinite()) return std::nullopt;
    bool moved = false;
    for (double t = 1.0; t >= 1.0 / 64.0; t /= 2.0) {
      ControlSequence trial = w;
      bool inside = true;
      for (size_t j = 0; j < trial.size(); ++j) {
        trial[j] += t * delta.segment(static_cast<Eigen::Index>(j) * m, m);
        inside = inside && sys.range.interior(trial[j]);
      }
      if (inside && residual(trial).norm() < norm) {
        w = std::move(trial);
        moved = true;
        break;
      }
    }
    if (!moved) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// Searches for a full-rank regular pair (e, u) with phi(k, e, u) = e, for k <= max_k.
///
/// The all-zero sequence is tried first for every k; then random interior sequences are
/// projected onto the return set {phi(k, e, .) = e} by Gauss-Newton. Failure yields
/// Unknown: a regular pair may still exist at larger k or elsewhere.
inline OpennessWitness openness_witness(const LinearSystem& sys, const OpennessOptions& opt = {}) {
  const int dim = sys.model.dim;
  const int m = sys.channels();
  const int max_k = opt.max_k > 0 ? opt.max_k : 2 * dim;
  const GroupElement e = sys.model.identity();
  OpennessWitness best;

  for (int k = 1; k <= max_k; ++k) {
    if (k * m < dim) continue;
    ControlSequence zeros(static_cast<size_t>(k), Vector::Zero(m));
    const RegularPairReport rp = regular_pair_rank(sys, e, zeros, opt.tol);
    if (rp.rank.accessible) return {Openness::Proven, zeros, chart_distance(rp.endpoint, e), rp.rank};
    if (rp.rank.rank > best.rank.rank) best.rank = rp.rank;
  }

  Rng rng(opt.seed);
  for (int k = 1; k <= max_k; ++k) {
    if (k * m <= dim) continue;
    // Directions in which the zero sequence returns to e to first order.
    const Matrix k0 = regular_pair_rank(sys, e, ControlSequence(static_cast<size_t>(k), Vector::Zero(m))).jacobian;
    const Eigen::FullPivLU<Matrix> lu(k0);
    const Matrix null = lu.kernel();
    const double radius = std::min(-sys.range.lo().maxCoeff(), sys.range.hi().minCoeff());
    for (int t = 0; t < opt.newton_trials; ++t) {
      ControlSequence w;
      const double shrink = 0.5 / (1.0 + t / 8);
      if (t % 2 == 1 && null.cols() > 0 && !null.isZero(0.0)) {
        Vector flat = null * uniform_vector(rng, null.cols(), -1.0, 1.0);
        flat *= shrink * radius / std::max(flat.cwiseAbs().maxCoeff(), 1e-300);
        for (int j = 0; j < k; ++j) w.push_back(flat.segment(j * m, m));
      } else {
        for (int j = 0; j < k; ++j) {
          Vector u(m);
          for (int c = 0; c < m; ++c) u[c] = shrink * uniform(rng, sys.range.lo()[c], sys.range.hi()[c]);
          w.push_back(u);
        }
      }
      auto ret = detail::project_to_return(sys, std::move(w));
      if (!ret) continue;
      const RegularPairReport rp = regular_pair_rank(sys, e, *ret, opt.tol);
      const double res = chart_distance(rp.endpoint, e);
      if (rp.rank.accessible && res <= 1e-12) return {Openness::Proven, *ret, res, rp.rank};
      if (rp.rank.rank > best.rank.rank) best.rank = rp.rank;
    }
  }
  best.status = Openness::Unknown;
  return best;
}

}  // namespace liesys
