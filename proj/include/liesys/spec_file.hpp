#pragma once

// JSON system descriptions and the built-in presets.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "liesys/system.hpp"

namespace liesys {

using Rows = std::vector<std::vector<double>>;

struct ControlSpec {
  std::string kind = "box";  // box | finite
  std::vector<double> lo, hi;
  Rows points;

  friend bool operator==(const ControlSpec&, const ControlSpec&) = default;
};

struct BracketEntry {
  int i = 0, j = 0, k = 0;  // [e_i, e_j] has e_k component `value`, zero-based
  double value = 0.0;

  friend bool operator==(const BracketEntry&, const BracketEntry&) = default;
};

struct SystemSpec {
  std::string name;
  std::string family;  // euclidean | aff2 | heisenberg | nilpotent
  Rows A, B;
  double a = 0.0, d = 1.0;
  std::vector<double> h_coeffs, g_coeffs;
  int dim = 0;
  std::vector<BracketEntry> structure;
  Rows f0;
  PolyMap beta;
  ControlSpec control;

  friend bool operator==(const SystemSpec&, const SystemSpec&) = default;
};

namespace detail {

using nlohmann::json;

inline Matrix to_matrix(const Rows& rows, const char* what) {
  if (rows.empty()) throw ArgumentError(std::string(what) + " is empty");
  const size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw ArgumentError(std::string(what) + " has ragged rows");
    for (size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

inline Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <class T>
T take(const json& j, const char* key) {
  if (!j.contains(key)) throw ArgumentError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ArgumentError(std::string("bad value for '") + key + "': " + ex.what());
  }
}

inline json poly_to_json(const PolyMap& p) {
  json comps = json::array();
  for (const auto& comp : p.components) {
    json terms = json::array();
    for (const auto& t : comp) terms.push_back({{"coeff", t.coeff}, {"powers", t.powers}});
    comps.push_back(terms);
  }
  return {{"inputs", p.inputs}, {"components", comps}};
}

inline PolyMap poly_from_json(const json& j) {
  PolyMap p;
  p.inputs = take<int>(j, "inputs");
  for (const auto& comp : take<json>(j, "components")) {
    std::vector<Monomial> terms;
    for (const auto& t : comp) terms.push_back({take<double>(t, "coeff"), take<std::vector<int>>(t, "powers")});
    p.components.push_back(std::move(terms));
  }
  p.validate();
  return p;
}

}  // namespace detail

inline SystemSpec spec_from_json(const nlohmann::json& j) {
  using detail::take;
  if (!j.is_object()) throw ArgumentError("system file must hold a JSON object");
  SystemSpec s;
  s.name = j.value("name", std::string("system"));
  s.family = take<std::string>(j, "family");
  if (s.family == "euclidean") {
    s.A = take<Rows>(j, "A");
    s.B = take<Rows>(j, "B");
  } else if (s.family == "aff2") {
    s.a = take<double>(j, "a");
    s.d = take<double>(j, "d");
    s.h_coeffs = take<std::vector<double>>(j, "h_coeffs");
    s.g_coeffs = take<std::vector<double>>(j, "g_coeffs");
  } else if (s.family == "heisenberg" || s.family == "nilpotent") {
    if (s.family == "nilpotent") {
      s.dim = take<int>(j, "dim");
      for (const auto& e : take<nlohmann::json>(j, "structure")) {
        const auto v = e.get<std::vector<double>>();
        if (v.size() != 4) throw ArgumentError("structure entries are [i, j, k, value]");
        s.structure.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]), v[3]});
      }
    }
    s.f0 = take<Rows>(j, "f0");
    s.beta = detail::poly_from_json(take<nlohmann::json>(j, "beta"));
  } else {
    throw ArgumentError("unknown family '" + s.family + "'");
  }
  const auto c = take<nlohmann::json>(j, "control");
  s.control.kind = take<std::string>(c, "kind");
  if (s.control.kind == "box") {
    s.control.lo = take<std::vector<double>>(c, "lo");
    s.control.hi = take<std::vector<double>>(c, "hi");
  } else if (s.control.kind == "finite") {
    s.control.points = take<Rows>(c, "points");
  } else {
    throw ArgumentError("control kind must be 'box' or 'finite'");
  }
  return s;
}

inline nlohmann::json spec_to_json(const SystemSpec& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["family"] = s.family;
  if (s.family == "euclidean") {
    j["A"] = s.A;
    j["B"] = s.B;
  } else if (s.family == "aff2") {
    j["a"] = s.a;
    j["d"] = s.d;
    j["h_coeffs"] = s.h_coeffs;
    j["g_coeffs"] = s.g_coeffs;
  } else {
    if (s.family == "nilpotent") {
      j["dim"] = s.dim;
      nlohmann::json st = nlohmann::json::array();
      for (const auto& e : s.structure) st.push_back({e.i, e.j, e.k, e.value});
      j["structure"] = st;
    }
    j["f0"] = s.f0;
    j["beta"] = detail::poly_to_json(s.beta);
  }
  if (s.control.kind == "box")
    j["control"] = {{"kind", "box"}, {"lo", s.control.lo}, {"hi", s.control.hi}};
  else
    j["control"] = {{"kind", "finite"}, {"points", s.control.points}};
  return j;
}

inline SystemSpec parse_spec(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw ArgumentError(std::string("system file is not valid JSON: ") + ex.what());
  }
  return spec_from_json(j);
}

inline SystemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open system file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

inline ControlRange build_control(const ControlSpec& c) {
  if (c.kind == "box") {
    if (c.lo.size() != c.hi.size()) throw ArgumentError("control lo/hi lengths differ");
    return ControlRange::box(detail::to_vector(c.lo), detail::to_vector(c.hi));
  }
  std::vector<Vector> pts;
  for (const auto& p : c.points) pts.push_back(detail::to_vector(p));
  return ControlRange::finite(std::move(pts));
}

inline LinearSystem build_system(const SystemSpec& s) {
  ControlRange range = build_control(s.control);
  if (s.family == "euclidean") {
    const Matrix a = detail::to_matrix(s.A, "A");
    if (a.rows() != a.cols()) throw ArgumentError("A must be square");
    if (Eigen::FullPivLU<Matrix>(a).rank() < a.rows()) throw ArgumentError("A must be invertible");
    return make_euclidean_system(a, detail::to_matrix(s.B, "B"), std::move(range), s.name);
  }
  if (s.family == "aff2") return make_aff2_system(s.a, s.d, s.h_coeffs, s.g_coeffs, std::move(range), s.name);
  GroupModel model = GroupModel::heisenberg();
  if (s.family == "nilpotent") {
    if (s.dim < 1) throw ArgumentError("nilpotent dim must be positive");
    StructureConstants c(s.dim);
    for (const auto& e : s.structure) {
      if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= s.dim || e.j >= s.dim || e.k >= s.dim)
        throw ArgumentError("structure index out of range");
      c.set_bracket(e.i, e.j, e.k, e.value);
    }
    model = GroupModel::nilpotent(std::move(c));
  }
  return make_nilpotent_system(std::move(model), detail::to_matrix(s.f0, "f0"), s.beta, std::move(range), s.name);
}

// ---------------------------------------------------------------------------
// Presets.
// ---------------------------------------------------------------------------

// f_u(x) = (x1 + x2 + x2^2/2 + u x2 + u x3 - u/2 - u^2/3, x2 + u, x2 + x3 - u/2) on U = [-1, 1].
inline SystemSpec heisenberg_example_spec() {
  SystemSpec s;
  s.name = "heisenberg-paper";
  s.family = "heisenberg";
  s.f0 = {{1, 1, 0}, {0, 1, 0}, {0, 1, 1}};
  s.beta.inputs = 1;
  s.beta.components = {{{-0.5, {1}}, {-1.0 / 3.0, {2}}}, {{1.0, {1}}}, {{-0.5, {1}}}};
  s.control = {"box", {-1.0}, {1.0}, {}};
  return s;
}

// a = 1, d = 1, h(u) = 1 + u, g = 0 on U = [-1/2, 1/2].
inline SystemSpec aff2_unit_dilation_spec() {
  SystemSpec s;
  s.name = "aff2-theorem39";
  s.family = "aff2";
  s.a = 1.0;
  s.d = 1.0;
  s.h_coeffs = {1.0, 1.0};
  s.g_coeffs = {0.0};
  s.control = {"box", {-0.5}, {0.5}, {}};
  return s;
}

inline std::vector<std::string> preset_names() { return {"heisenberg-paper", "aff2-theorem39"}; }

inline SystemSpec preset_spec(const std::string& name) {
  if (name == "heisenberg-paper") return heisenberg_example_spec();
  if (name == "aff2-theorem39") return aff2_unit_dilation_spec();
  throw ArgumentError("unknown preset '" + name + "'");
}

}  // namespace liesys
