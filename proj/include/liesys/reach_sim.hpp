#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "liesys/point_set.hpp"
#include "liesys/system.hpp"

namespace liesys {

struct CloudConfig {
  int steps = 1;
  int controls_per_channel = 5;
  double prune_cell = 1e-3;
  std::size_t max_points = 1000000;
  std::uint64_t seed = kDefaultSeed;

  void validate() const {
    if (steps < 1) throw ArgumentError("cloud steps must be at least 1");
    if (controls_per_channel < 1) throw ArgumentError("controls_per_channel must be at least 1");
    if (!(prune_cell > 0.0) || !std::isfinite(prune_cell)) throw ArgumentError("prune_cell must be positive");
    if (max_points < 1) throw ArgumentError("max_points must be at least 1");
  }
};

enum class CloudDirection { Forward, Backward };

struct PointCloud {
  std::vector<GroupElement> points;
  std::vector<int> k_reached;
  CloudConfig cfg;
  std::string digest;
  bool truncated = false;
};

/// Stable hash of a system: family, dimension and rounded probe values of f_0 and beta.
inline std::string system_digest(const LinearSystem& sys) {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  auto feed_vec = [&](const Vector& v) {
    char buf[32];
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double x = std::abs(v[i]) < 1e-13 ? 0.0 : v[i];
      std::snprintf(buf, sizeof buf, "%.9e;", x);
      feed(buf);
    }
  };
  feed(to_string(sys.model.family));
  feed(std::to_string(sys.model.dim));
  feed(std::to_string(sys.channels()));
  feed_vec(sys.range.lo());
  feed_vec(sys.range.hi());
  for (const auto& p : sys.range.points()) feed_vec(p);
  Rng rng(7);
  for (int i = 0; i < 4; ++i) feed_vec(sys.aut(random_group(sys.model, rng, 0.5)).coords);
  for (double t : {-0.5, -0.25, 0.25, 0.5}) {
    Vector u(sys.channels());
    for (int c = 0; c < sys.channels(); ++c) u[c] = t * (t < 0 ? -sys.range.lo()[c] : sys.range.hi()[c]);
    feed_vec(sys.beta(u).coords);
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

/// Control values used by the cloud: the finite set itself, or per channel
/// n evenly spaced values from lo to hi with 0 added.
inline std::vector<Vector> cloud_controls(const ControlRange& range, int per_channel) {
  if (range.kind() == ControlRange::Kind::FiniteSet) return range.points();
  std::vector<Vector> out{Vector::Zero(range.channels())};
  for (int c = 0; c < range.channels(); ++c) {
    std::vector<double> vals;
    if (per_channel == 1) {
      vals = {0.0};
    } else {
      bool has_zero = false;
      for (int i = 0; i < per_channel; ++i) {
        const double v = i == per_channel - 1
                             ? range.hi()[c]
                             : range.lo()[c] + (range.hi()[c] - range.lo()[c]) * i / (per_channel - 1);
        vals.push_back(v);
        has_zero = has_zero || v == 0.0;
      }
      if (!has_zero) vals.push_back(0.0);
    }
    std::vector<Vector> next;
    for (const auto& base : out)
      for (double v : vals) {
        Vector u = base;
        u[c] = v;
        next.push_back(u);
      }
    out = std::move(next);
  }
  return out;
}

/// Breadth-first approximation of R_{<=k}(start) (or C_{<=k} through the reversed system).
///
/// Only points new at a level are expanded; with 0 in U and start = e this yields R_k(e).
inline PointCloud reach_cloud(const LinearSystem& sys, const CloudConfig& cfg,
                              CloudDirection dir = CloudDirection::Forward,
                              const std::optional<GroupElement>& start = std::nullopt) {
  cfg.validate();
  const LinearSystem run = dir == CloudDirection::Forward ? sys : reversed(sys);
  const GroupElement x0 = start ? *start : sys.model.identity();
  require_group(sys.model, x0);
  const std::vector<Vector> controls = cloud_controls(run.range, cfg.controls_per_channel);

  PointCloud cloud;
  cloud.cfg = cfg;
  cloud.digest = system_digest(sys);
  PointSet seen(cfg.prune_cell);
  seen.insert(x0);
  cloud.points.push_back(x0);
  cloud.k_reached.push_back(0);
  std::vector<GroupElement> frontier{x0};
  for (int k = 1; k <= cfg.steps && !frontier.empty() && !cloud.truncated; ++k) {
    std::vector<GroupElement> next;
    for (const auto& p : frontier) {
      for (const auto& u : controls) {
        const GroupElement q = run.apply(p, u);
        if (!seen.insert(q)) continue;
        if (cloud.points.size() >= cfg.max_points) {
          cloud.truncated = true;
          break;
        }
        cloud.points.push_back(q);
        cloud.k_reached.push_back(k);
        next.push_back(q);
      }
      if (cloud.truncated) break;
    }
    frontier = std::move(next);
  }
  return cloud;
}

/// Fraction of the grid cells of [lo, hi] at spacing `res` holding a cloud point.
/// Cells are closed: a point on a shared face counts for every adjacent cell.
inline double coverage(const PointCloud& cloud, const Vector& lo, const Vector& hi, double res) {
  if (lo.size() != hi.size() || lo.size() == 0) throw ArgumentError("coverage box bounds mismatch");
  if (!(res > 0.0)) throw ArgumentError("coverage resolution must be positive");
  const Eigen::Index d = lo.size();
  std::vector<long> n(static_cast<size_t>(d));
  double total = 1.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(hi[i] > lo[i])) throw ArgumentError("coverage box must have positive volume");
    n[static_cast<size_t>(i)] = std::max(1L, static_cast<long>(std::ceil((hi[i] - lo[i]) / res - 1e-9)));
    total *= static_cast<double>(n[static_cast<size_t>(i)]);
  }
  if (total > 5e7) throw ResourceError("coverage grid too large");
  std::vector<char> hit(static_cast<size_t>(total), 0);
  const double eps = 1e-9 * res;
  for (const auto& p : cloud.points) {
    if (p.size() != d) continue;
    std::vector<long> first(static_cast<size_t>(d)), last(static_cast<size_t>(d));
    bool inside = true;
    for (Eigen::Index i = 0; i < d && inside; ++i) {
      const double t = (p[i] - lo[i]) / res;
      const long cells = n[static_cast<size_t>(i)];
      long a = static_cast<long>(std::floor(t - eps / res));
      long b = static_cast<long>(std::floor(t + eps / res));
      if (std::abs(t - std::round(t)) * res <= eps) {
        a = static_cast<long>(std::round(t)) - 1;
        b = static_cast<long>(std::round(t));
      }
      a = std::max(a, 0L);
      b = std::min(b, cells - 1);
      if (a > b || p[i] < lo[i] - eps || p[i] > hi[i] + eps) inside = false;
      first[static_cast<size_t>(i)] = a;
      last[static_cast<size_t>(i)] = b;
    }
    if (!inside) continue;
    std::vector<long> idx = first;
    while (true) {
      size_t flat = 0;
      for (Eigen::Index i = d - 1; i >= 0; --i)
        flat = flat * static_cast<size_t>(n[static_cast<size_t>(i)]) + static_cast<size_t>(idx[static_cast<size_t>(i)]);
      hit[flat] = 1;
      size_t ax = 0;
      while (ax < idx.size() && ++idx[ax] > last[ax]) {
        idx[ax] = first[ax];
        ++ax;
      }
      if (ax == idx.size()) break;
    }
  }
  size_t count = 0;
  for (char c : hit) count += c != 0;
  return static_cast<double>(count) / total;
}

struct DualityReport {
  bool equal = false;
  std::size_t forward_size = 0;   // cloud of the reversed system
  std::size_t backward_size = 0;  // exact enumeration of C_k(e)
};

/// Forward cloud of reversed(sys) against the exact controllable set of sys, at tolerance prune_cell.
inline DualityReport duality_cloud_check(const LinearSystem& sys, const CloudConfig& cfg) {
  if (sys.range.kind() != ControlRange::Kind::FiniteSet)
    throw PreconditionError("duality check needs a finite control set");
  const GroupElement e = sys.model.identity();
  PointSet forward(cfg.prune_cell);
  if (cfg.steps == 0) {
    forward.insert(e);
  } else {
    for (const auto& p : reach_cloud(reversed(sys), cfg).points) forward.insert(p);
  }
  const PointSet backward = controllable_set_finite(sys, cfg.steps, e, cfg.prune_cell);
  return {forward.equals(backward), forward.size(), backward.size()};
}

/// Decimal rendering with 12 significant digits and no exponent.
inline std::string format_decimal(double v) {
  if (v == 0.0 || !std::isfinite(v)) return v == 0.0 ? "0" : (std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf"));
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  const std::string s(buf);
  const bool neg = s[0] == '-';
  const size_t start = neg ? 1 : 0;
  const size_t epos = s.find('e');
  std::string digits = s.substr(start, 1) + s.substr(start + 2, epos - start - 2);
  const int exp10 = std::stoi(s.substr(epos + 1));
  std::string out;
  if (exp10 < 0) {
    out = "0." + std::string(static_cast<size_t>(-exp10 - 1), '0') + digits;
  } else if (exp10 + 1 >= static_cast<int>(digits.size())) {
    out = digits + std::string(static_cast<size_t>(exp10 + 1) - digits.size(), '0');
  } else {
    out = digits.substr(0, static_cast<size_t>(exp10 + 1)) + "." + digits.substr(static_cast<size_t>(exp10 + 1));
  }
  if (out.find('.') != std::string::npos) {
    while (out.back() == '0') out.pop_back();
    if (out.back() == '.') out.pop_back();
  }
  if (out == "0") return out;
  return neg ? "-" + out : out;
}

/// CSV with header k,x1,...,xd and LF line endings.
inline void write_csv(std::ostream& os, const PointCloud& cloud) {
  const Eigen::Index d = cloud.points.empty() ? 0 : cloud.points.front().size();
  os << "k";
  for (Eigen::Index i = 0; i < d; ++i) os << ",x" << (i + 1);
  os << '\n';
  for (size_t r = 0; r < cloud.points.size(); ++r) {
    os << cloud.k_reached[r];
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << format_decimal(cloud.points[r][i]);
    os << '\n';
  }
}

}  // namespace liesys
