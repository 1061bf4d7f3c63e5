#include "perzyna/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "perzyna/errors.hpp"

namespace perzyna {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

using Section = std::map<std::string, std::string>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"mesh", {"type", "nx", "ny", "lx", "ly", "file"}},
      {"material", {"lambda", "mu", "alpha", "kappa", "eps", "p0"}},
      {"time", {"T", "n_steps", "solver", "max_newton"}},
      {"bc", {"wx", "wx_t", "wy", "wy_t"}},
      {"load", {"fx", "fx_t", "fy", "fy_t"}},
      {"safeload", {"chi_xx", "chi_xx_t", "chi_yy", "chi_yy_t", "chi_xy", "chi_xy_t", "delta", "div_tol"}},
      {"output",
       {"dir", "fields", "margin", "energy", "flow_rule", "safe_load", "probe", "energy_tol", "probe_radii",
        "probe_threshold", "duality_phi", "duality_phi_t"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Section> s) : sections_(std::move(s)) {}

  bool has(const std::string& sec, const std::string& key) const {
    auto it = sections_.find(sec);
    return it != sections_.end() && it->second.count(key) > 0;
  }
  const std::string& raw(const std::string& sec, const std::string& key) const {
    if (!has(sec, key)) throw ScenarioError("missing required key [" + sec + "] " + key);
    return sections_.at(sec).at(key);
  }
  double number(const std::string& sec, const std::string& key) const {
    const std::string& v = raw(sec, key);
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return d;
    } catch (const std::exception&) {
      throw ScenarioError("[" + sec + "] " + key + ": not a number: '" + v + "'");
    }
  }
  double number(const std::string& sec, const std::string& key, double fallback) const {
    return has(sec, key) ? number(sec, key) : fallback;
  }
  int integer(const std::string& sec, const std::string& key, std::optional<int> fallback = {}) const {
    if (!has(sec, key) && fallback) return *fallback;
    const std::string& v = raw(sec, key);
    try {
      std::size_t used = 0;
      const int i = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return i;
    } catch (const std::exception&) {
      throw ScenarioError("[" + sec + "] " + key + ": not an integer: '" + v + "'");
    }
  }
  bool boolean(const std::string& sec, const std::string& key, bool fallback) const {
    if (!has(sec, key)) return fallback;
    const std::string& v = raw(sec, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ScenarioError("[" + sec + "] " + key + ": expected true/false, got '" + v + "'");
  }
  FieldExpr field(const std::string& sec, const std::string& key) const {
    FieldExpr f;
    if (has(sec, key)) f.coef = parse_coefficients(raw(sec, key));
    if (has(sec, key + "_t")) f.time = parse_time_profile(raw(sec, key + "_t"));
    return f;
  }

 private:
  std::map<std::string, Section> sections_;
};

std::map<std::string, Section> tokenize(std::istream& in) {
  std::map<std::string, Section> sections;
  std::string current;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioError(where + "malformed section header '" + line + "'");
      current = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(current)) throw ScenarioError(where + "unknown section [" + current + "]");
      if (sections.count(current)) throw ScenarioError(where + "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(where + "expected 'key = value', got '" + line + "'");
    if (current.empty()) throw ScenarioError(where + "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().at(current).count(key)) throw ScenarioError(where + "unknown key '" + key + "' in [" + current + "]");
    if (sections[current].count(key)) throw ScenarioError(where + "duplicate key '" + key + "'");
    sections[current][key] = value;
  }
  return sections;
}

std::vector<double> parse_list(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  for (std::string tok; in >> tok;) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ScenarioError("bad list entry '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

Mesh Scenario::build_mesh() const {
  if (const auto* rect = std::get_if<RectSpec>(&mesh)) return build_rect_mesh(*rect);
  return read_mesh_file(std::get<std::filesystem::path>(mesh));
}

void Scenario::validate() const {
  if (!(T > 0.0)) throw ScenarioError("T must be > 0");
  if (n_steps < 1) throw ScenarioError("n_steps must be >= 1");
  if (!(eps > 0.0)) throw ScenarioError("eps must be > 0");
  if (max_newton < 1) throw ScenarioError("max_newton must be >= 1");
  if (!(delta > 0.0 && delta < params.kappa)) throw ScenarioError("delta must lie in (0, kappa)");
  if (!(margin >= 0.0)) throw ScenarioError("margin must be >= 0");
  if (const auto* path = std::get_if<std::filesystem::path>(&mesh)) {
    if (!std::filesystem::exists(*path)) throw ScenarioError("mesh file not found: " + path->string());
  }
  for (double r : diag.probe_radii)
    if (!(r > 0.0)) throw ScenarioError("probe radii must be positive");
}

Scenario parse_scenario(std::istream& in, const std::filesystem::path& base_dir) {
  const Reader rd(tokenize(in));
  Scenario sc;

  const std::string type = rd.has("mesh", "type") ? rd.raw("mesh", "type") : "rect";
  if (type == "rect") {
    if (rd.has("mesh", "file")) throw ScenarioError("[mesh] file given with type = rect");
    sc.mesh = RectSpec{rd.integer("mesh", "nx"), rd.integer("mesh", "ny"), rd.number("mesh", "lx", 1.0),
                       rd.number("mesh", "ly", 1.0)};
  } else if (type == "file") {
    std::filesystem::path p = rd.raw("mesh", "file");
    if (p.is_relative()) p = base_dir / p;
    sc.mesh = p;
  } else {
    throw ScenarioError("[mesh] type must be rect or file, got '" + type + "'");
  }

  try {
    sc.params = MaterialParams::make(rd.number("material", "lambda"), rd.number("material", "mu"),
                                     rd.number("material", "alpha"), rd.number("material", "kappa"));
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  sc.eps = rd.number("material", "eps");
  if (rd.has("material", "p0")) {
    const auto c = parse_list(rd.raw("material", "p0"));
    if (c.size() != 3) throw ScenarioError("[material] p0 expects 3 components: xx yy xy");
    sc.p0 = {c[0], c[1], c[2]};
  }

  sc.T = rd.number("time", "T");
  sc.n_steps = rd.integer("time", "n_steps");
  sc.max_newton = rd.integer("time", "max_newton", 50);
  if (rd.has("time", "solver")) {
    const std::string& s = rd.raw("time", "solver");
    if (s == "perzyna") sc.solver = SolverKind::perzyna;
    else if (s == "rate_independent") sc.solver = SolverKind::rate_independent;
    else throw ScenarioError("[time] solver must be perzyna or rate_independent, got '" + s + "'");
  }

  sc.w = {rd.field("bc", "wx"), rd.field("bc", "wy")};
  sc.f = {rd.field("load", "fx"), rd.field("load", "fy")};
  if (rd.has("safeload", "chi_xx") || rd.has("safeload", "chi_yy") || rd.has("safeload", "chi_xy")) {
    sc.chi = TensorExpr{rd.field("safeload", "chi_xx"), rd.field("safeload", "chi_yy"), rd.field("safeload", "chi_xy")};
  }
  sc.delta = rd.number("safeload", "delta", 0.5 * sc.params.kappa);
  sc.div_tol = rd.number("safeload", "div_tol", 1e-8);

  if (rd.has("output", "dir")) sc.out_dir = rd.raw("output", "dir");
  sc.dump_fields = rd.boolean("output", "fields", true);
  sc.margin = rd.number("output", "margin", 0.15);
  sc.diag.energy = rd.boolean("output", "energy", true);
  sc.diag.flow_rule = rd.boolean("output", "flow_rule", true);
  sc.diag.safe_load = rd.boolean("output", "safe_load", true);
  sc.diag.probe = rd.boolean("output", "probe", false);
  sc.diag.energy_tol = rd.number("output", "energy_tol", sc.diag.energy_tol);
  if (rd.has("output", "probe_radii")) sc.diag.probe_radii = parse_list(rd.raw("output", "probe_radii"));
  sc.diag.probe_threshold = rd.number("output", "probe_threshold", sc.diag.probe_threshold);
  if (rd.has("output", "duality_phi")) sc.diag.duality_phi = rd.field("output", "duality_phi");

  sc.validate();
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  return parse_scenario(in, path.parent_path());
}

}  // namespace perzyna
