#pragma once

#include <complex>
#include <sstream>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "liesys/accessibility.hpp"
#include "liesys/spectral.hpp"
#include "liesys/system.hpp"

namespace liesys {

enum class Conclusion { Controllable, NotControllable, Inconclusive };

inline const char* to_string(Conclusion c) {
  switch (c) {
    case Conclusion::Controllable: return "Controllable";
    case Conclusion::NotControllable: return "NotControllable";
    case Conclusion::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct HypothesisCheck {
  std::string name;
  bool holds = false;
  std::string detail;
};

struct Justification {
  std::string theorem;  // T3.4, T3.9, T4.3, EUC
  std::vector<HypothesisCheck> checks;
};

struct Verdict {
  bool g_equals_g0 = false;
  std::vector<double> moduli;
  Openness r_open = Openness::Unknown;
  Openness c_open = Openness::Unknown;
  GroupClass group_class = GroupClass::Solvable;
  Conclusion conclusion = Conclusion::Inconclusive;
  std::string theorem;
  std::vector<Justification> justification;
  SpectralSplit split;
  OpennessWitness r_witness;
  OpennessWitness c_witness;
};

struct ClassifyOptions {
  int max_k = 0;  // 0 selects 2 * dim
  int depth = 3;
  int samples = 8;
  int newton_trials = 24;
  double rank_tol = kRankTol;
  double split_tol = 0.0;  // 0 selects 1e-9 for closed-form differentials, 1e-6 otherwise
  std::uint64_t seed = kDefaultSeed;
};

struct EuclideanCheck {
  int kalman_rank = 0;
  std::vector<double> moduli;
  bool controllable = false;
};

/// rank[B AB ... A^{d-1} B] = d and every eigenvalue of A on the unit circle.
inline EuclideanCheck euclidean_check(const Matrix& a, const Matrix& b, double tol = 1e-9) {
  if (a.rows() != a.cols() || a.rows() == 0) throw ArgumentError("A must be square and nonempty");
  if (b.rows() != a.rows()) throw ArgumentError("B must have as many rows as A");
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible() || a.determinant() == 0.0) throw ArgumentError("A is singular: f_0 must lie in Gl(d,R)");
  const Eigen::Index d = a.rows();
  Matrix kalman(d, d * b.cols());
  Matrix block = b;
  for (Eigen::Index i = 0; i < d; ++i) {
    kalman.middleCols(i * b.cols(), b.cols()) = block;
    block = a * block;
  }
  EuclideanCheck out;
  if (kalman.size() > 0) {
    const Vector sv = Eigen::JacobiSVD<Matrix>(kalman).singularValues();
    const double cut = 1e-9 * (sv.size() ? sv[0] : 0.0);
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > cut && sv[i] > 0.0) ++out.kalman_rank;
  }
  const Eigen::EigenSolver<Matrix> es(a, false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    out.moduli.push_back(std::abs(es.eigenvalues()[i]));
    worst = std::max(worst, std::abs(out.moduli.back() - 1.0));
  }
  out.controllable = out.kalman_rank == d && worst <= tol;
  return out;
}

/// Sufficient condition for Aff(2,R): accessibility together with d = 1.
inline bool aff2_controllable(double a, double d, double hp0, double gp0) {
  if (d == 0.0) throw ArgumentError("d must be nonzero");
  return aff2_accessible(a, d, hp0, gp0) && std::abs(d - 1.0) <= 1e-12;
}

namespace detail {

inline double split_tolerance(const LinearSystem& sys, const ClassifyOptions& opt) {
  if (opt.split_tol > 0.0) return opt.split_tol;
  return sys.aut.differential ? 1e-9 : 1e-6;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Witness search, demoted to heuristic_no when sampled adjoint chains already miss a direction.
inline std::pair<Openness, OpennessWitness> openness(const LinearSystem& sys, const ClassifyOptions& opt) {
  OpennessOptions oo;
  oo.max_k = opt.max_k;
  oo.newton_trials = opt.newton_trials;
  oo.tol = opt.rank_tol;
  oo.seed = opt.seed;
  OpennessWitness w = openness_witness(sys, oo);
  if (w.status == Openness::Proven) return {Openness::Proven, w};
  GammaOptions go;
  go.depth = opt.depth;
  go.samples = opt.samples;
  go.tol = opt.rank_tol;
  go.seed = opt.seed;
  const RankReport gr = gamma_rank(sys, sys.model.identity(), go);
  w.status = gr.accessible ? Openness::Unknown : Openness::HeuristicNo;
  return {w.status, w};
}

}  // namespace detail

inline Verdict classify(const LinearSystem& sys, const ClassifyOptions& opt = {}) {
  Verdict v;
  v.group_class = sys.group_class();
  const Matrix df = differential_at_identity(sys.model, sys.aut);
  v.split = eigensplit(df, detail::split_tolerance(sys, opt));
  v.moduli = v.split.moduli();
  v.g_equals_g0 = v.split.dim_zero() == sys.model.dim;
  std::tie(v.r_open, v.r_witness) = detail::openness(sys, opt);
  std::tie(v.c_open, v.c_witness) = detail::openness(reversed(sys), opt);

  const bool r_ok = v.r_open == Openness::Proven;
  const bool c_ok = v.c_open == Openness::Proven;
  const HypothesisCheck g0{"g_equals_g0", v.g_equals_g0,
                           "dims +/0/- = " + std::to_string(v.split.dim_plus()) + "/" +
                               std::to_string(v.split.dim_zero()) + "/" + std::to_string(v.split.dim_minus())};
  const HypothesisCheck r_check{"r_open", r_ok, to_string(v.r_open)};
  const HypothesisCheck c_check{"c_open", c_ok, to_string(v.c_open)};

  switch (v.group_class) {
    case GroupClass::Euclidean: {
      v.theorem = "EUC";
      if (!sys.euclid) break;
      const EuclideanCheck ec = euclidean_check(sys.euclid->a, sys.euclid->b, v.split.tol);
      const HypothesisCheck kal{"kalman_rank", ec.kalman_rank == sys.model.dim,
                                std::to_string(ec.kalman_rank) + "/" + std::to_string(sys.model.dim)};
      v.justification.push_back({"EUC", {kal, g0, r_check, c_check}});
      if (!ec.controllable)
        v.conclusion = Conclusion::NotControllable;
      else if (r_ok && c_ok && v.g_equals_g0)
        v.conclusion = Conclusion::Controllable;
      break;
    }
    case GroupClass::NilpotentSC: {
      v.theorem = "T4.3";
      v.justification.push_back({"T4.3", {g0, r_check, c_check}});
      if (!v.g_equals_g0)
        v.conclusion = Conclusion::NotControllable;
      else if (r_ok && c_ok)
        v.conclusion = Conclusion::Controllable;
      break;
    }
    case GroupClass::SolvableSC:
    case GroupClass::Solvable: {
      v.theorem = "T3.4";
      if (sys.aff2) {
        const auto& p = *sys.aff2;
        const bool acc = aff2_accessible(p.a, p.d, p.hp0, p.gp0);
        const HypothesisCheck acc_check{"accessible", acc,
                                        "h'(0)=" + detail::fmt(p.hp0) + " g'(0)=" + detail::fmt(p.gp0)};
        const HypothesisCheck d_check{"d_is_1", std::abs(p.d - 1.0) <= 1e-12, "d=" + detail::fmt(p.d)};
        v.justification.push_back({"T3.9", {acc_check, d_check, r_check, c_check}});
        if (aff2_controllable(p.a, p.d, p.hp0, p.gp0) && r_ok && c_ok && v.g_equals_g0) {
          v.theorem = "T3.9";
          v.conclusion = Conclusion::Controllable;
          break;
        }
      }
      v.justification.push_back({"T3.4", {g0, r_check, c_check}});
      if (r_ok && c_ok && v.g_equals_g0) v.conclusion = Conclusion::Controllable;
      break;
    }
  }
  return v;
}

enum class ReachTest { Proven, Refuted, Unknown };

inline const char* to_string(ReachTest r) {
  switch (r) {
    case ReachTest::Proven: return "proven";
    case ReachTest::Refuted: return "refuted";
    case ReachTest::Unknown: return "unknown";
  }
  return "?";
}

/// R = G iff G = G^{+,0}, on simply connected nilpotent groups with R open. A nontrivial
/// stable block refutes R = G outright; a proof also needs an openness witness for R.
inline ReachTest reach_equals_group_test(const LinearSystem& sys, const ClassifyOptions& opt = {}) {
  const GroupClass gc = sys.group_class();
  if (gc != GroupClass::Euclidean && gc != GroupClass::NilpotentSC)
    throw PreconditionError("reach_equals_group_test needs a simply connected nilpotent group");
  const SpectralSplit split = eigensplit(differential_at_identity(sys.model, sys.aut), detail::split_tolerance(sys, opt));
  if (split.dim_minus() > 0) return ReachTest::Refuted;
  if (split.boundary_warning) return ReachTest::Unknown;
  OpennessOptions oo;
  oo.max_k = opt.max_k;
  oo.newton_trials = opt.newton_trials;
  oo.tol = opt.rank_tol;
  oo.seed = opt.seed;
  return openness_witness(sys, oo).status == Openness::Proven ? ReachTest::Proven : ReachTest::Unknown;
}

}  // namespace liesys
