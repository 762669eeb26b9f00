#pragma once

// Command-line front end. Reports are key=value lines on stdout.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liesys/accessibility.hpp"
#include "liesys/controllability.hpp"
#include "liesys/reach_sim.hpp"
#include "liesys/spec_file.hpp"

namespace liesys::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSpec = 2;
inline constexpr int kExitNumeric = 3;

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

inline std::string complex_str(const std::complex<double>& z) {
  if (std::abs(z.imag()) <= 1e-14) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? "-" : "+") + num(std::abs(z.imag())) + "i";
}

inline const char* yes(bool b) { return b ? "true" : "false"; }

struct Common {
  std::string system;
  std::string preset;
  double tol = 0.0;
  int depth = 3;
  int max_k = 0;
  int samples = 8;
  std::uint64_t seed = kDefaultSeed;
};

inline void add_common(CLI::App* sub, Common& c) {
  auto* sys = sub->add_option("--system", c.system, "system file (JSON)");
  auto* pre = sub->add_option("--preset", c.preset, "built-in system: heisenberg-paper | aff2-theorem39");
  sys->excludes(pre);
  sub->add_option("--tol", c.tol, "tolerance (split for decompose, rank otherwise)");
  sub->add_option("--depth", c.depth, "adjoint chain depth")->check(CLI::PositiveNumber);
  sub->add_option("--max-k", c.max_k, "longest control sequence for openness search (0: 2*dim)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--samples", c.samples, "random chains per length")->check(CLI::NonNegativeNumber);
  sub->add_option("--seed", c.seed, "seed for randomized procedures");
}

inline SystemSpec load(const Common& c) {
  if (c.system.empty() == c.preset.empty()) throw ArgumentError("give exactly one of --system or --preset");
  return c.preset.empty() ? load_spec(c.system) : preset_spec(c.preset);
}

inline ClassifyOptions classify_options(const Common& c) {
  ClassifyOptions o;
  o.max_k = c.max_k;
  o.depth = c.depth;
  o.samples = c.samples;
  o.seed = c.seed;
  if (c.tol > 0.0) o.rank_tol = c.tol;
  return o;
}

inline void header(std::ostream& out, const LinearSystem& sys) {
  out << "system=" << sys.name << "\n";
  out << "family=" << to_string(sys.model.family) << "\n";
  out << "dim=" << sys.model.dim << "\n";
  out << "group_class=" << to_string(sys.group_class()) << "\n";
  out << "digest=" << system_digest(sys) << "\n";
}

inline void decompose(const LinearSystem& sys, const Common& c, std::ostream& out) {
  const double tol = c.tol > 0.0 ? c.tol : (sys.aut.differential ? 1e-9 : 1e-6);
  const Matrix df = differential_at_identity(sys.model, sys.aut);
  const SpectralSplit s = eigensplit(df, tol);
  header(out, sys);
  std::string ev;
  for (size_t i = 0; i < s.eigenvalues.size(); ++i) ev += (i ? "," : "") + complex_str(s.eigenvalues[i]);
  out << "eigenvalues=" << ev << "\n";
  out << "moduli=" << join(s.moduli()) << "\n";
  out << "split_tol=" << num(tol) << "\n";
  out << "dim_plus=" << s.dim_plus() << "\n";
  out << "dim_zero=" << s.dim_zero() << "\n";
  out << "dim_minus=" << s.dim_minus() << "\n";
  out << "block_dims=" << s.dim_plus() << "/" << s.dim_zero() << "/" << s.dim_minus() << "\n";
  out << "boundary_warning=" << yes(s.boundary_warning) << "\n";
  out << "invariance_residual=" << num(std::max({invariance_residual(df, s.basis_plus), invariance_residual(df, s.basis_zero),
                                                 invariance_residual(df, s.basis_minus)}))
      << "\n";
  const ClosureReport cr = closure_check(sys.model, s);
  out << "closure_plus=" << yes(cr.plus_subalgebra) << "\n";
  out << "closure_zero=" << yes(cr.zero_subalgebra) << "\n";
  out << "closure_minus=" << yes(cr.minus_subalgebra) << "\n";
}

inline void rank_lines(std::ostream& out, const std::string& key, const RankReport& r) {
  out << key << "=" << r.rank << "/" << r.dim << "\n";
  out << key << "_singular_values=" << join(r.singular_values) << "\n";
}

inline void accessibility(const LinearSystem& sys, const Common& c, std::ostream& out) {
  const ClassifyOptions o = classify_options(c);
  GammaOptions go{o.depth, o.samples, o.rank_tol, o.seed};
  header(out, sys);
  const GroupElement e = sys.model.identity();
  const RankReport plus = gamma_rank(sys, e, go, Direction::Plus);
  const RankReport minus = gamma_rank(sys, e, go, Direction::Minus);
  rank_lines(out, "gamma_plus_rank", plus);
  rank_lines(out, "gamma_minus_rank", minus);
  out << "forward_accessible=" << yes(plus.accessible) << "\n";
  out << "backward_accessible=" << yes(minus.accessible) << "\n";
  if (sys.aff2) {
    const auto& p = *sys.aff2;
    out << "aff2_accessible=" << yes(aff2_accessible(p.a, p.d, p.hp0, p.gp0)) << "\n";
  }
  OpennessOptions oo{o.max_k, o.newton_trials, o.rank_tol, o.seed};
  const OpennessWitness r = openness_witness(sys, oo);
  const OpennessWitness cw = openness_witness(reversed(sys), oo);
  out << "regular_pair_R=" << to_string(r.status) << " rank=" << r.rank.rank << "/" << r.rank.dim
      << " k=" << r.controls.size() << "\n";
  out << "regular_pair_C=" << to_string(cw.status) << " rank=" << cw.rank.rank << "/" << cw.rank.dim
      << " k=" << cw.controls.size() << "\n";
}

inline void classify_cmd(const LinearSystem& sys, const Common& c, std::ostream& out) {
  const Verdict v = classify(sys, classify_options(c));
  header(out, sys);
  out << "moduli=" << join(v.moduli) << "\n";
  out << "block_dims=" << v.split.dim_plus() << "/" << v.split.dim_zero() << "/" << v.split.dim_minus() << "\n";
  out << "g_equals_g0=" << yes(v.g_equals_g0) << "\n";
  out << "r_open=" << to_string(v.r_open) << "\n";
  out << "c_open=" << to_string(v.c_open) << "\n";
  for (const auto& j : v.justification)
    for (const auto& h : j.checks)
      out << "check." << j.theorem << "." << h.name << "=" << yes(h.holds) << " (" << h.detail << ")\n";
  if (v.group_class == GroupClass::Euclidean || v.group_class == GroupClass::NilpotentSC)
    out << "reach_equals_group=" << to_string(reach_equals_group_test(sys, classify_options(c))) << "\n";
  out << "theorem=" << v.theorem << "\n";
  out << "verdict=" << to_string(v.conclusion) << " [" << v.theorem << "]\n";
}

struct SimOptions {
  int steps = 4;
  int lattice = 5;
  double prune = 1e-3;
  std::size_t max_points = 1000000;
  std::string direction = "forward";
  std::string out;
  std::vector<double> box_lo, box_hi;
  double res = 0.5;
};

inline void simulate(const LinearSystem& sys, const Common& c, const SimOptions& s, std::ostream& out) {
  CloudConfig cfg{s.steps, s.lattice, s.prune, s.max_points, c.seed};
  const CloudDirection dir = s.direction == "backward" ? CloudDirection::Backward : CloudDirection::Forward;
  const PointCloud cloud = reach_cloud(sys, cfg, dir);
  header(out, sys);
  out << "direction=" << s.direction << "\n";
  out << "steps=" << s.steps << "\n";
  out << "points=" << cloud.points.size() << "\n";
  out << "truncated=" << yes(cloud.truncated) << "\n";
  if (!s.box_lo.empty() || !s.box_hi.empty()) {
    if (s.box_lo.size() != s.box_hi.size() || static_cast<int>(s.box_lo.size()) != sys.model.dim)
      throw ArgumentError("--box-lo/--box-hi need one value per group coordinate");
    const Vector lo = Eigen::Map<const Vector>(s.box_lo.data(), sys.model.dim);
    const Vector hi = Eigen::Map<const Vector>(s.box_hi.data(), sys.model.dim);
    const double cov = coverage(cloud, lo, hi, s.res);
    out << "coverage=" << num(cov) << "\n";
  }
  if (!s.out.empty()) {
    std::ofstream f(s.out, std::ios::binary);
    if (!f) throw ArgumentError("cannot write " + s.out);
    write_csv(f, cloud);
    out << "out=" << s.out << "\n";
  }
}

inline bool verify(const LinearSystem& sys, const Common& c, std::ostream& out) {
  header(out, sys);
  bool all = true;
  auto line = [&](const std::string& key, bool ok, double residual) {
    out << "check." << key << "=" << (ok ? "pass" : "fail") << " residual=" << num(residual) << "\n";
    all = all && ok;
  };
  const AutomorphismReport ar = check_automorphism(sys.model, sys.aut, c.seed);
  line("automorphism", ar.ok, std::max({ar.identity_residual, ar.homomorphism_residual, ar.inverse_residual}));
  const GroupElement e = sys.model.identity();
  line("control_at_zero", chart_distance(sys.beta(Vector::Zero(sys.channels())), e) <= 1e-12,
       chart_distance(sys.beta(Vector::Zero(sys.channels())), e));

  Rng rng(c.seed);
  const LinearSystem rev = reversed(sys);
  double trans = 0.0, inverse = 0.0;
  for (int t = 0; t < 10; ++t) {
    ControlSequence w;
    for (int j = 0; j < 5; ++j) {
      if (sys.range.kind() == ControlRange::Kind::FiniteSet) {
        const auto& pts = sys.range.points();
        w.push_back(pts[static_cast<size_t>(rng() % pts.size())]);
      } else {
        w.push_back(random_interior_control(sys.range, rng));
      }
    }
    const GroupElement g = random_group(sys.model, rng, 0.5);
    trans = std::max(trans, translation_identity_residual(sys, 5, g, w));
    inverse = std::max(inverse, chart_distance(rev.apply(sys.apply(g, w[0]), w[0]), g));
  }
  line("translation_identity", trans <= 1e-9, trans);
  line("reversed_inverts", inverse <= 1e-9, inverse);

  const double tol = sys.aut.differential ? 1e-9 : 1e-6;
  const Matrix df = differential_at_identity(sys.model, sys.aut);
  const SpectralSplit s = eigensplit(df, tol);
  const double inv_res = std::max({invariance_residual(df, s.basis_plus), invariance_residual(df, s.basis_zero),
                                   invariance_residual(df, s.basis_minus)});
  line("split_invariance", inv_res <= 1e-9 && s.dim_plus() + s.dim_zero() + s.dim_minus() == sys.model.dim, inv_res);
  const ClosureReport cr = closure_check(sys.model, s);
  line("split_closure", cr.plus_subalgebra && cr.zero_subalgebra && cr.minus_subalgebra,
       std::max({cr.plus_residual, cr.zero_residual, cr.minus_residual}));

  if (sys.range.kind() == ControlRange::Kind::FiniteSet) {
    int k = 1;
    while (k < 3 && std::pow(static_cast<double>(sys.range.points().size()), k + 1) <= 2e4) ++k;
    CloudConfig cfg{k, 1, kDedupTol, 1000000, c.seed};
    const DualityReport dr = duality_cloud_check(sys, cfg);
    line("duality_k" + std::to_string(k), dr.equal,
         static_cast<double>(dr.forward_size > dr.backward_size ? dr.forward_size - dr.backward_size
                                                                 : dr.backward_size - dr.forward_size));
  }
  out << "verified=" << yes(all) << "\n";
  return all;
}

}  // namespace detail

/// Runs one subcommand; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Linear control systems on Lie groups", "liesys"};
  app.require_subcommand(1);
  detail::Common common;
  detail::SimOptions sim;

  auto* dec = app.add_subcommand("decompose", "eigenvalues and unstable/center/stable blocks of df_0");
  auto* acc = app.add_subcommand("accessibility", "adjoint chain ranks and regular pairs at e");
  auto* cls = app.add_subcommand("classify", "controllability verdict");
  auto* simc = app.add_subcommand("simulate", "reachable set point cloud");
  auto* ver = app.add_subcommand("verify", "self-consistency checks of a system");
  for (auto* sub : {dec, acc, cls, simc, ver}) detail::add_common(sub, common);
  simc->add_option("--steps", sim.steps, "BFS depth")->check(CLI::PositiveNumber);
  simc->add_option("--lattice", sim.lattice, "control values per channel (0 always added)")
      ->check(CLI::PositiveNumber);
  simc->add_option("--prune", sim.prune, "dedup cell size")->check(CLI::PositiveNumber);
  simc->add_option("--max-points", sim.max_points, "point budget")->check(CLI::PositiveNumber);
  simc->add_option("--direction", sim.direction, "forward | backward")
      ->check(CLI::IsMember({"forward", "backward"}));
  simc->add_option("--out", sim.out, "CSV output path");
  simc->add_option("--box-lo", sim.box_lo, "coverage box lower corner")->delimiter(',');
  simc->add_option("--box-hi", sim.box_hi, "coverage box upper corner")->delimiter(',');
  simc->add_option("--res", sim.res, "coverage cell size")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kExitSpec;
  }

  try {
    const LinearSystem sys = build_system(detail::load(common));
    if (dec->parsed()) detail::decompose(sys, common, out);
    if (acc->parsed()) detail::accessibility(sys, common, out);
    if (cls->parsed()) detail::classify_cmd(sys, common, out);
    if (simc->parsed()) detail::simulate(sys, common, sim, out);
    if (ver->parsed() && !detail::verify(sys, common, out)) return kExitNumeric;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitSpec;
  }
  return kExitOk;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"liesys"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace liesys::cli
