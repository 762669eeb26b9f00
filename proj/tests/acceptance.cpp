// One line per acceptance criterion: PASS/FAIL, a short summary and the runtime against its budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "aff2_forms.hpp"
#include "fixtures.hpp"
#include "liesys/liesys.hpp"
#include "oracles.hpp"

using namespace liesys;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) note << "; ";
      note << what;
      pass = false;
    }
  }
};

double rel_err(const Vector& got, const Vector& want) {
  return (got - want).cwiseAbs().maxCoeff() / std::max(1.0, want.cwiseAbs().maxCoeff());
}

// 1. Heisenberg example.
void heisenberg_example(Outcome& o) {
  const LinearSystem sys = fixture::heisenberg();
  const Matrix df = differential_at_identity(sys.model, sys.aut);
  const Eigen::EigenSolver<Matrix> es(df, false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) worst = std::max(worst, std::abs(es.eigenvalues()[i] - 1.0));
  o.require(worst <= 1e-9, "eigenvalue off 1 by " + std::to_string(worst));
  const RankReport g = gamma_rank(sys, sys.model.identity());
  o.require(g.rank == 3, "gamma rank " + std::to_string(g.rank) + "/3");
  const Verdict v = classify(sys);
  o.require(v.conclusion == Conclusion::Controllable && v.theorem == "T4.3",
            std::string("classify ") + to_string(v.conclusion) + " [" + v.theorem + "], r_open=" + to_string(v.r_open) +
                " c_open=" + to_string(v.c_open));
  if (o.pass) o.note << "eigenvalues 1,1,1; gamma 3/3; Controllable [T4.3]";
}

// 2. Aff2 unit dilation instance and the falsifier.
void aff2_instance(Outcome& o) {
  const LinearSystem sys = fixture::aff2(1, 1, {1, 1}, {0});
  o.require(aff2_accessible(1, 1, 1, 0), "criterion false");
  const Vector z = Vector::Zero(1);
  o.require(regular_pair_rank(sys, sys.model.identity(), {z, z}).rank.accessible, "regular pair not full rank");
  const Verdict v = classify(sys);
  o.require(v.conclusion == Conclusion::Controllable && v.theorem == "T3.9",
            std::string("classify ") + to_string(v.conclusion) + " [" + v.theorem + "]");
  const LinearSystem bad = fixture::aff2(0, 1, {1, 1}, {0, 1});
  o.require(!aff2_accessible(0, 1, 1, 1), "falsifier passes the criterion");
  for (const GroupElement& g : {GroupElement{1.0, 0.0}, GroupElement{2.0, 1.0}, GroupElement{0.3, -2.0}})
    o.require(gamma_rank(bad, g).rank < 2, "falsifier gamma full at " + std::to_string(g[0]));
  if (o.pass) o.note << "Controllable [T3.9]; falsifier rank < 2 at 3 points";
}

// 3. Finite-difference fields against closed forms.
void closed_forms(Outcome& o) {
  Rng rng(301);
  double worst = 0.0;
  const Vector z = Vector::Zero(1);
  for (int t = 0; t < 50; ++t) {
    const fixture::Aff2Case p = fixture::random_params(rng);
    const LinearSystem sys = p.system();
    const GroupElement g{uniform(rng, 0.2, 3.0), uniform(rng, -2, 2)};
    const double x = g[0];
    worst = std::max({worst, rel_err(x_plus(sys, z, g)[0].vec, p.xp(0, x)),
                      rel_err(x_minus(sys, z, g)[0].vec, p.xm(0, x)),
                      rel_err(ad_chain(sys, Direction::Plus, {z}, z, g)[0].vec, p.ad_plus1(0, 0, x)),
                      rel_err(ad_chain(sys, Direction::Minus, {z}, z, g)[0].vec, p.ad_minus1(0, 0, x)),
                      rel_err(ad_chain(sys, Direction::Plus, {z, z}, z, g)[0].vec, p.ad_plus2_zero(x)),
                      rel_err(ad_chain(sys, Direction::Minus, {z, z}, z, g)[0].vec, p.ad_minus2_zero(x))});
  }
  o.require(worst <= 1e-5, "max relative error " + std::to_string(worst));
  if (o.pass) o.note << "50 sets, max relative error " << worst;
}

int kalman_rank(const Matrix& a, const Matrix& b) {
  const int d = static_cast<int>(a.rows());
  Matrix k(d, d * b.cols());
  Matrix blk = b;
  for (int i = 0; i < d; ++i) {
    k.middleCols(i * b.cols(), b.cols()) = blk;
    blk = a * blk;
  }
  const Eigen::JacobiSVD<Matrix> svd(k);
  const Vector s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) r += s[i] > 1e-9 * s[0];
  return r;
}

Matrix rotation_blocks(Rng& rng, int d) {
  Matrix core = Matrix::Identity(d, d);
  for (int i = 0; i + 1 < d; i += 2) {
    const double th = uniform(rng, 0.3, 2.8);
    core.block(i, i, 2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  }
  if (d % 2 == 1 && uniform(rng, 0, 1) < 0.5) core(d - 1, d - 1) = -1.0;
  return core;
}

// 4. Classical Euclidean criterion and the quarter turn.
void euclidean(Outcome& o) {
  Rng rng(401);
  int agree = 0, full = 0;
  for (int t = 0; t < 50; ++t) {
    const int d = 2 + t % 3;
    Matrix m(d, d);
    for (int i = 0; i < d * d; ++i) m(i / d, i % d) = uniform(rng, -1, 1);
    const Matrix q = Eigen::HouseholderQR<Matrix>(m).householderQ();
    const Matrix a = q * rotation_blocks(rng, d) * q.transpose();
    Matrix b;
    if (t % 2 == 0) {
      b = Matrix(d, 1 + t % 2);
      for (Eigen::Index i = 0; i < b.size(); ++i) b(i % d, i / d) = uniform(rng, -1, 1);
    } else {
      b = q.leftCols(std::min(2, d - 1)) * uniform_vector(rng, std::min(2, d - 1), -1, 1);  // inside one block
    }
    const int kr = kalman_rank(a, b);
    const EuclideanCheck ec = euclidean_check(a, b);
    agree += ec.controllable == (kr == d);
    full += kr == d;
  }
  o.require(agree == 50, std::to_string(50 - agree) + " disagreements");
  o.require(full > 10 && full < 40, "degenerate sample, " + std::to_string(full) + " full rank");
  Matrix rot(2, 2), b(2, 1);
  rot << 0, 1, -1, 0;
  b << 0, 1;
  o.require(euclidean_check(rot, b).controllable, "quarter turn not controllable");
  const LinearSystem sys = make_euclidean_system(rot, b, ControlRange::symmetric_box(1, 1));
  CloudConfig cfg;
  cfg.steps = 20;
  cfg.controls_per_channel = 5;
  const double cov = coverage(reach_cloud(sys, cfg), Vector::Constant(2, -1), Vector::Constant(2, 1), 0.25);
  o.require(cov >= 0.95, "coverage " + std::to_string(cov));
  if (o.pass) o.note << "50/50 agree (" << full << " full rank); quarter turn coverage " << cov;
}

PointSet product(const GroupModel& m, const PointSet& a, const std::vector<GroupElement>& b) {
  PointSet out(1e-9);
  for (const auto& p : a.points())
    for (const auto& q : b) out.insert(mul(m, p, q));
  return out;
}

// 5. Reachable set algebra on exact enumerations.
void set_algebra(Outcome& o) {
  const std::vector<LinearSystem> systems{
      fixture::euclid1(2, 1, fixture::finite1({-1, 0, 1})),
      fixture::aff2(1, 1, {1, 1}, {0}, fixture::finite1({-0.25, 0, 0.25})),
      fixture::heisenberg(fixture::finite1({-1, -0.5, 0, 0.5, 1}))};
  Rng rng(501);
  int checks = 0;
  for (const auto& sys : systems) {
    const GroupElement e = sys.model.identity();
    const LinearSystem rev = reversed(sys);
    std::vector<PointSet> r;
    for (int k = 0; k <= 4; ++k) r.push_back(reachable_set_finite(sys, k, e, 1e-9));
    for (int k1 = 0; k1 <= 4; ++k1) {
      for (int k2 = k1; k2 <= 4; ++k2, ++checks)
        o.require(r[static_cast<size_t>(k2)].includes(r[static_cast<size_t>(k1)]), sys.name + " monotone");
      const GroupElement g = random_group(sys.model, rng, 0.5);
      o.require(reachable_set_finite(sys, k1, g, 1e-9)
                    .equals(product(sys.model, r[static_cast<size_t>(k1)], {automorphism_power(sys, g, k1)})),
                sys.name + " translate k=" + std::to_string(k1));
      o.require(r[static_cast<size_t>(k1)].equals(controllable_set_finite(rev, k1, e, 1e-9)),
                sys.name + " duality k=" + std::to_string(k1));
      checks += 2;
      for (int k2 = 0; k1 + k2 <= 4; ++k2, ++checks) {
        std::vector<GroupElement> shifted;
        for (const auto& p : r[static_cast<size_t>(k2)].points()) shifted.push_back(automorphism_power(sys, p, k1));
        o.require(r[static_cast<size_t>(k1 + k2)].equals(product(sys.model, r[static_cast<size_t>(k1)], shifted)),
                  sys.name + " concatenation " + std::to_string(k1) + "+" + std::to_string(k2));
      }
    }
  }
  if (o.pass) o.note << checks << " set identities on 3 systems";
}

// 6. BCH against the matrix group.
void bch_oracle(Outcome& o) {
  const GroupModel h = GroupModel::heisenberg();
  Rng rng(601);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const AlgebraElement x = random_algebra(h, rng, 2.0), y = random_algebra(h, rng, 2.0);
    const Vector series = bch(h, x, y, 2).coords;
    const Vector via_group = log(h, mul(h, exp(h, x), exp(h, y))).coords;
    const Vector via_matrix = oracle::heis_coords(
        oracle::nil_log(oracle::nil_exp(oracle::heis_algebra(x.coords)) * oracle::nil_exp(oracle::heis_algebra(y.coords))));
    worst = std::max({worst, (series - via_group).norm(), (series - via_matrix).norm()});
  }
  o.require(worst <= 1e-10, "max error " + std::to_string(worst));
  const Vector z = bch(h, h.basis(1), h.basis(2), 2).coords;
  o.require(z == Vector{{0.5, 1.0, 1.0}}, "basis pair gives something other than (1/2,1,1)");
  if (o.pass) o.note << "100 pairs, max error " << worst << "; (e2,e3) -> (1/2,1,1)";
}

double span_distance(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return 1.0;
  return std::max(span_residual(a, b), span_residual(b, a));
}

// 7. Spectral split on random matrices.
void spectral(Outcome& o) {
  Rng rng(701);
  double worst = 0.0;
  int swapped = 0;
  for (int t = 0; t < 200; ++t) {
    const int d = 2 + t % 5;
    Matrix l(d, d);
    do {
      for (int i = 0; i < d * d; ++i) l(i / d, i % d) = uniform(rng, -1.5, 1.5);
    } while (std::abs(l.determinant()) < 1e-3);
    const SpectralSplit s = eigensplit(l);
    o.require(s.dim_plus() + s.dim_zero() + s.dim_minus() == d, "dims do not sum");
    worst = std::max({worst, invariance_residual(l, s.basis_plus), invariance_residual(l, s.basis_zero),
                      invariance_residual(l, s.basis_minus)});
    const SpectralSplit r = eigensplit(l.inverse());
    swapped += r.dim_plus() == s.dim_minus() && r.dim_minus() == s.dim_plus() &&
               span_distance(r.basis_plus, s.basis_minus) <= 1e-9 && span_distance(r.basis_minus, s.basis_plus) <= 1e-9;
  }
  o.require(worst <= 1e-9, "invariance residual " + std::to_string(worst));
  o.require(swapped == 200, std::to_string(200 - swapped) + " inverse splits not swapped");
  if (o.pass) o.note << "200 matrices, max residual " << worst;
}

// 8. Leaf confinement with h = 1.
void confinement(Outcome& o) {
  Rng rng(801);
  size_t total = 0;
  for (int t = 0; t < 5; ++t) {
    const LinearSystem sys = fixture::aff2(uniform(rng, -2, 2), uniform(rng, 0.5, 2), {1}, {0, 1, -0.5});
    const GroupElement start{uniform(rng, 0.1, 4), uniform(rng, -3, 3)};
    CloudConfig cfg;
    cfg.steps = 6;
    const PointCloud c = reach_cloud(sys, cfg, CloudDirection::Forward, start);
    for (const auto& p : c.points) o.require(p[0] == start[0], "first coordinate moved");
    total += c.points.size();
    if (!o.pass) break;
  }
  if (o.pass) o.note << total << " cloud points, first coordinate bit-equal to the start";
}

struct Criterion {
  int id;
  double budget_s;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> all{{1, 5, heisenberg_example}, {2, 5, aff2_instance}, {3, 30, closed_forms},
                                   {4, 60, euclidean},         {5, 30, set_algebra},   {6, 5, bch_oracle},
                                   {7, 30, spectral},          {8, 5, confinement}};
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& ex) {
      o.require(false, std::string("exception: ") + ex.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs <= c.budget_s, "over time budget");
    failed += !o.pass;
    std::printf("criterion %d: %s  %s  (%.2f s, budget %.0f s)\n", c.id, o.pass ? "PASS" : "FAIL", o.note.str().c_str(),
                secs, c.budget_s);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
