#pragma once

// Discrete-time linear control systems g_{k+1} = f_{u_k}(e) * f_0(g_k).

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liesys/errors.hpp"
#include "liesys/lie_core.hpp"
#include "liesys/point_set.hpp"
#include "liesys/spectral.hpp"

namespace liesys {

// ---------------------------------------------------------------------------
// Polynomial maps R^m -> R^n, used for control-to-group maps u -> f_u(e).
// ---------------------------------------------------------------------------

struct Monomial {
  double coeff = 0.0;
  std::vector<int> powers;  // one exponent per input channel

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

struct PolyMap {
  int inputs = 0;
  std::vector<std::vector<Monomial>> components;

  [[nodiscard]] int outputs() const { return static_cast<int>(components.size()); }

  [[nodiscard]] Vector eval(const Vector& u) const {
    Vector out = Vector::Zero(outputs());
    for (int i = 0; i < outputs(); ++i)
      for (const auto& t : components[static_cast<size_t>(i)]) {
        double v = t.coeff;
        for (int c = 0; c < inputs; ++c) v *= std::pow(u[c], t.powers[static_cast<size_t>(c)]);
        out[i] += v;
      }
    return out;
  }

  // d eval / d u, outputs x inputs.
  [[nodiscard]] Matrix jacobian(const Vector& u) const {
    Matrix j = Matrix::Zero(outputs(), inputs);
    for (int i = 0; i < outputs(); ++i)
      for (const auto& t : components[static_cast<size_t>(i)])
        for (int c = 0; c < inputs; ++c) {
          const int p = t.powers[static_cast<size_t>(c)];
          if (p == 0) continue;
          double v = t.coeff * p * std::pow(u[c], p - 1);
          for (int o = 0; o < inputs; ++o)
            if (o != c) v *= std::pow(u[o], t.powers[static_cast<size_t>(o)]);
          j(i, c) += v;
        }
    return j;
  }

  void validate() const {
    for (const auto& comp : components)
      for (const auto& t : comp) {
        if (static_cast<int>(t.powers.size()) != inputs) throw ArgumentError("monomial has wrong number of exponents");
        for (int p : t.powers)
          if (p < 0) throw ArgumentError("monomial exponents must be non-negative");
        if (!std::isfinite(t.coeff)) throw ArgumentError("monomial coefficient is not finite");
      }
  }

  // u -> B u.
  static PolyMap linear(const Matrix& b) {
    PolyMap p{static_cast<int>(b.cols()), {}};
    p.components.resize(static_cast<size_t>(b.rows()));
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        if (b(i, c) == 0.0) continue;
        std::vector<int> pw(static_cast<size_t>(b.cols()), 0);
        pw[static_cast<size_t>(c)] = 1;
        p.components[static_cast<size_t>(i)].push_back({b(i, c), pw});
      }
    return p;
  }

  // Single-channel univariate polynomials, coefficient lists in increasing degree.
  static PolyMap univariate(const std::vector<std::vector<double>>& coeffs) {
    PolyMap p{1, {}};
    for (const auto& cs : coeffs) {
      std::vector<Monomial> comp;
      for (size_t k = 0; k < cs.size(); ++k)
        if (cs[k] != 0.0) comp.push_back({cs[k], {static_cast<int>(k)}});
      p.components.push_back(std::move(comp));
    }
    return p;
  }

  friend bool operator==(const PolyMap&, const PolyMap&) = default;
};

// ---------------------------------------------------------------------------
// Control ranges.
// ---------------------------------------------------------------------------

/// The admissible control values U. Both kinds must contain 0.
///
/// A FiniteSet is a finite sub-sampling of a compact neighborhood of 0; exact set
/// algebra runs on it. Interior tests for a FiniteSet use its bounding box.
class ControlRange {
 public:
  enum class Kind { Box, FiniteSet };

  static ControlRange box(Vector lo, Vector hi) {
    if (lo.size() != hi.size() || lo.size() == 0) throw ArgumentError("box bounds must have equal positive length");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
      if (!(lo[i] < 0.0 && 0.0 < hi[i])) throw ArgumentError("box control range needs lo < 0 < hi on every channel");
    ControlRange r;
    r.kind_ = Kind::Box;
    r.lo_ = std::move(lo);
    r.hi_ = std::move(hi);
    return r;
  }

  static ControlRange symmetric_box(int channels, double radius) {
    return box(Vector::Constant(channels, -radius), Vector::Constant(channels, radius));
  }

  static ControlRange finite(std::vector<Vector> points) {
    if (points.empty()) throw ArgumentError("finite control set is empty");
    const Eigen::Index m = points.front().size();
    if (m == 0) throw ArgumentError("finite control set needs at least one channel");
    bool has_zero = false;
    for (const auto& p : points) {
      if (p.size() != m) throw ArgumentError("finite control set has inconsistent channel counts");
      if (!p.allFinite()) throw ArgumentError("finite control set has non-finite entries");
      if (p.isZero(0.0)) has_zero = true;
    }
    if (!has_zero) throw ArgumentError("finite control set must contain 0");
    ControlRange r;
    r.kind_ = Kind::FiniteSet;
    r.points_ = std::move(points);
    r.lo_ = r.points_.front();
    r.hi_ = r.points_.front();
    for (const auto& p : r.points_) {
      r.lo_ = r.lo_.cwiseMin(p);
      r.hi_ = r.hi_.cwiseMax(p);
    }
    return r;
  }

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int channels() const { return static_cast<int>(lo_.size()); }
  [[nodiscard]] const Vector& lo() const { return lo_; }
  [[nodiscard]] const Vector& hi() const { return hi_; }
  [[nodiscard]] const std::vector<Vector>& points() const { return points_; }

  [[nodiscard]] bool contains(const Vector& u, double tol = 1e-12) const {
    if (u.size() != lo_.size() || !u.allFinite()) return false;
    if (kind_ == Kind::Box) return ((u - lo_).array() >= -tol).all() && ((hi_ - u).array() >= -tol).all();
    for (const auto& p : points_)
      if ((p - u).cwiseAbs().maxCoeff() <= tol) return true;
    return false;
  }

  // Strictly inside the (bounding) box.
  [[nodiscard]] bool interior(const Vector& u) const {
    if (u.size() != lo_.size() || !u.allFinite()) return false;
    return ((u - lo_).array() > 0.0).all() && ((hi_ - u).array() > 0.0).all();
  }

  friend bool operator==(const ControlRange& a, const ControlRange& b) {
    if (a.kind_ != b.kind_ || a.lo_.size() != b.lo_.size()) return false;
    if (a.kind_ == Kind::Box) return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    if (a.points_.size() != b.points_.size()) return false;
    for (size_t i = 0; i < a.points_.size(); ++i)
      if (a.points_[i] != b.points_[i]) return false;
    return true;
  }

 private:
  Kind kind_ = Kind::Box;
  Vector lo_, hi_;
  std::vector<Vector> points_;
};

// ---------------------------------------------------------------------------
// Linear systems.
// ---------------------------------------------------------------------------

enum class GroupClass { Euclidean, NilpotentSC, SolvableSC, Solvable };

inline const char* to_string(GroupClass c) {
  switch (c) {
    case GroupClass::Euclidean: return "euclidean";
    case GroupClass::NilpotentSC: return "nilpotent_sc";
    case GroupClass::SolvableSC: return "solvable_sc";
    case GroupClass::Solvable: return "solvable";
  }
  return "?";
}

struct EuclideanParams {
  Matrix a;
  Matrix b;
};

// f_u(x, y) = (h(u) x, a (x - 1) + d y + g(u) x), single control channel.
struct Aff2Params {
  double a = 0.0;
  double d = 1.0;
  double hp0 = 0.0;  // h'(0)
  double gp0 = 0.0;  // g'(0)
};

using ControlMap = std::function<GroupElement(const Vector&)>;

struct LinearSystem {
  std::string name;
  GroupModel model;
  Automorphism aut;
  ControlMap beta;  // u -> f_u(e)
  ControlRange range;
  std::optional<EuclideanParams> euclid;
  std::optional<Aff2Params> aff2;
  bool reversed = false;

  [[nodiscard]] int channels() const { return range.channels(); }

  [[nodiscard]] GroupClass group_class() const {
    switch (model.family) {
      case Family::Euclidean: return GroupClass::Euclidean;
      case Family::Heisenberg:
      case Family::Nilpotent: return GroupClass::NilpotentSC;
      case Family::Aff2: return GroupClass::SolvableSC;
    }
    return GroupClass::Solvable;
  }

  // f_u(g) without the control membership check; finite differences probe near U.
  [[nodiscard]] GroupElement apply(const GroupElement& g, const Vector& u) const {
    return mul(model, beta(u), aut(g));
  }

  // f_u^{-1}(g) = f_0^{-1}(f_u(e)^{-1} g).
  [[nodiscard]] GroupElement apply_inverse(const GroupElement& g, const Vector& u) const {
    return aut.inverse(mul(model, inv(model, beta(u)), g));
  }
};

namespace detail {

inline void validate_system(const LinearSystem& sys) {
  const GroupElement e = sys.model.identity();
  const Vector zero = Vector::Zero(sys.channels());
  if (chart_distance(sys.beta(zero), e) > 1e-12) throw ModelError("f_0(e) must equal e: beta(0) is not the identity");
  const AutomorphismReport rep = check_automorphism(sys.model, sys.aut);
  if (!rep.ok)
    throw ModelError("f_0 fails the automorphism check (identity " + std::to_string(rep.identity_residual) +
                     ", homomorphism " + std::to_string(rep.homomorphism_residual) + ", inverse " +
                     std::to_string(rep.inverse_residual) + ")");
}

}  // namespace detail

inline LinearSystem make_euclidean_system(const Matrix& a, const Matrix& b, ControlRange range,
                                          std::string name = "euclidean") {
  if (a.rows() != a.cols()) throw ArgumentError("A must be square");
  if (b.rows() != a.rows()) throw ArgumentError("B must have as many rows as A");
  if (b.cols() != range.channels()) throw ArgumentError("B columns must match the control channels");
  const int d = static_cast<int>(a.rows());
  LinearSystem sys{std::move(name), GroupModel::euclidean(d), Automorphism::euclidean(a),
                   [b](const Vector& u) { return GroupElement(b * u); }, std::move(range),
                   EuclideanParams{a, b}, std::nullopt};
  detail::validate_system(sys);
  return sys;
}

/// Linear system on Aff(2,R) with h, g given by coefficient lists in increasing degree.
inline LinearSystem make_aff2_system(double a, double d, std::vector<double> h_coeffs, std::vector<double> g_coeffs,
                                     ControlRange range, std::string name = "aff2") {
  if (d == 0.0) throw ArgumentError("Aff(2,R) system needs d != 0");
  if (range.channels() != 1) throw ArgumentError("Aff(2,R) systems use a single control channel");
  if (h_coeffs.empty() || h_coeffs[0] != 1.0) throw ArgumentError("h must satisfy h(0) = 1");
  if (!g_coeffs.empty() && g_coeffs[0] != 0.0) throw ArgumentError("g must satisfy g(0) = 0");
  const PolyMap hg = PolyMap::univariate({h_coeffs, g_coeffs});
  // h maps U into R^+.
  const double lo = range.lo()[0], hi = range.hi()[0];
  for (int i = 0; i <= 2000; ++i) {
    const double u = lo + (hi - lo) * i / 2000.0;
    if (!(hg.eval(Vector::Constant(1, u))[0] > 0.0))
      throw ArgumentError("h must be positive on the control range (fails at u = " + std::to_string(u) + ")");
  }
  Aff2Params params{a, d, h_coeffs.size() > 1 ? h_coeffs[1] : 0.0, g_coeffs.size() > 1 ? g_coeffs[1] : 0.0};
  LinearSystem sys{std::move(name), GroupModel::aff2(), Automorphism::aff2(a, d),
                   [hg](const Vector& u) {
                     const Vector v = hg.eval(u);
                     return GroupElement{v[0], v[1]};
                   },
                   std::move(range), std::nullopt, params};
  detail::validate_system(sys);
  return sys;
}

/// Linear system on a nilpotent family with f_0 given by its Lie algebra automorphism.
inline LinearSystem make_nilpotent_system(GroupModel model, const Matrix& f0_algebra, PolyMap beta,
                                          ControlRange range, std::string name = "nilpotent") {
  if (model.family != Family::Heisenberg && model.family != Family::Nilpotent)
    throw ArgumentError("make_nilpotent_system needs a Heisenberg or structure-constant model");
  beta.validate();
  if (beta.inputs != range.channels()) throw ArgumentError("beta inputs must match the control channels");
  if (beta.outputs() != model.dim) throw ArgumentError("beta outputs must match the group dimension");
  Automorphism aut = Automorphism::from_algebra_matrix(model, f0_algebra);
  LinearSystem sys{std::move(name), model, std::move(aut),
                   [beta](const Vector& u) { return GroupElement(beta.eval(u)); }, std::move(range),
                   std::nullopt, std::nullopt};
  detail::validate_system(sys);
  return sys;
}

// ---------------------------------------------------------------------------
// Dynamics.
// ---------------------------------------------------------------------------

inline GroupElement step(const LinearSystem& sys, const GroupElement& g, const Vector& u) {
  if (!sys.range.contains(u)) throw ArgumentError("control value lies outside U");
  return sys.apply(g, u);
}

using ControlSequence = std::vector<Vector>;

/// phi(k, g, u) = f_{u_{k-1}} o ... o f_{u_0}(g).
inline GroupElement trajectory(const LinearSystem& sys, int k, const GroupElement& g, const ControlSequence& useq) {
  if (k < 0) throw ArgumentError("trajectory length must be non-negative");
  if (static_cast<int>(useq.size()) < k) throw ArgumentError("control sequence shorter than k");
  GroupElement x = g;
  for (int j = 0; j < k; ++j) x = step(sys, x, useq[static_cast<size_t>(j)]);
  return x;
}

inline GroupElement automorphism_power(const LinearSystem& sys, const GroupElement& g, int k) {
  GroupElement x = g;
  for (int j = 0; j < k; ++j) x = sys.aut(x);
  for (int j = 0; j > k; --j) x = sys.aut.inverse(x);
  return x;
}

/// Chart distance between phi(k, g, u) and phi(k, e, u) * f_0^k(g).
inline double translation_identity_residual(const LinearSystem& sys, int k, const GroupElement& g,
                                            const ControlSequence& useq) {
  const GroupElement lhs = trajectory(sys, k, g, useq);
  const GroupElement rhs =
      mul(sys.model, trajectory(sys, k, sys.model.identity(), useq), automorphism_power(sys, g, k));
  return chart_distance(lhs, rhs);
}

/// The reversed system h_{k+1} = f_{u_k}^{-1}(e) f_0^{-1}(h_k), whose maps are the inverses f_u^{-1}.
inline LinearSystem reversed(const LinearSystem& sys) {
  LinearSystem out;
  out.name = sys.name + (sys.reversed ? "" : "*");
  if (sys.reversed && !out.name.empty() && out.name.back() == '*') out.name.pop_back();
  out.model = sys.model;
  out.aut = sys.aut.inverted();
  out.range = sys.range;
  out.reversed = !sys.reversed;
  const GroupModel model = sys.model;
  const ChartMap f0_inv = sys.aut.inverse;
  const ControlMap beta = sys.beta;
  out.beta = [model, f0_inv, beta](const Vector& u) { return f0_inv(inv(model, beta(u))); };
  if (sys.euclid) {
    const Matrix a_inv = sys.euclid->a.inverse();
    out.euclid = EuclideanParams{a_inv, -a_inv * sys.euclid->b};
  }
  if (sys.aff2) {
    const auto& p = *sys.aff2;
    // f_0^{-1}(x, y) = (x, -a/d (x - 1) + y / d); f~_u(e) = f_0^{-1}(1/h, -g/h).
    out.aff2 = Aff2Params{-p.a / p.d, 1.0 / p.d, -p.hp0, (p.a * p.hp0 - p.gp0) / p.d};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact reachable / controllable sets over a finite control set.
// ---------------------------------------------------------------------------

inline constexpr double kDedupTol = 1e-9;
inline constexpr double kEnumerationGuard = 1e6;

namespace detail {

template <class StepFn>
PointSet enumerate_levels(const LinearSystem& sys, int k, const GroupElement& from, double tol, StepFn&& next) {
  if (sys.range.kind() != ControlRange::Kind::FiniteSet)
    throw PreconditionError("exact enumeration needs a finite control set");
  if (k < 0) throw ArgumentError("k must be non-negative");
  require_group(sys.model, from);
  const double count = std::pow(static_cast<double>(sys.range.points().size()), k);
  if (count > kEnumerationGuard)
    throw ResourceError("|U|^k = " + std::to_string(count) + " exceeds the enumeration guard 1e6");
  PointSet level(tol);
  level.insert(from);
  for (int j = 0; j < k; ++j) {
    PointSet next_level(tol);
    for (const auto& p : level.points())
      for (const auto& u : sys.range.points()) next_level.insert(next(p, u));
    level = std::move(next_level);
  }
  return level;
}

}  // namespace detail

/// R_k(from): every endpoint of a length-k control sequence over the finite set U.
inline PointSet reachable_set_finite(const LinearSystem& sys, int k, const GroupElement& from,
                                     double tol = kDedupTol) {
  return detail::enumerate_levels(sys, k, from, tol,
                                  [&](const GroupElement& p, const Vector& u) { return sys.apply(p, u); });
}

/// C_k(to): every start point steered to `to` by some length-k sequence over U.
inline PointSet controllable_set_finite(const LinearSystem& sys, int k, const GroupElement& to,
                                        double tol = kDedupTol) {
  return detail::enumerate_levels(sys, k, to, tol,
                                  [&](const GroupElement& p, const Vector& u) { return sys.apply_inverse(p, u); });
}

}  // namespace liesys
