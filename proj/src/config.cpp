#include "dislo/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace dislo {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) {
    // Commas are accepted as separators too.
    std::size_t start = 0;
    for (std::size_t c = w.find(','); c != std::string::npos; c = w.find(',', start)) {
      if (c > start) out.push_back(w.substr(start, c - start));
      start = c + 1;
    }
    if (start < w.size()) out.push_back(w.substr(start));
  }
  return out;
}

std::optional<double> to_double(const std::string& s) {
  // "a/b" is accepted so that eps can be written as 1/64.
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto num = to_double(s.substr(0, slash));
    auto den = to_double(s.substr(slash + 1));
    if (!num || !den || *den == 0.0) return std::nullopt;
    return *num / *den;
  }
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"lattice", {"epsilon", "gamma", "domain", "radius", "half_width", "polygon_file"}},
      {"potentials", {"name", "alpha1", "alpha2"}},
      {"frame", {"angle"}},
      {"dislocations", {"dislocation"}},
      {"far_field", {"matrix"}},
      {"solver", {"grad_tol", "max_iter", "memory", "fixed_frame", "profile_order"}},
      {"scaling", {"epsilons"}},
      {"selfenergy", {"zeta", "ratios"}},
      {"phi", {"burgers", "search_bound"}},
      {"thin_annulus", {"m", "epsilons"}},
      {"output", {"dir", "svg"}},
  };
  return s;
}

class Reader {
 public:
  Reader(const IniFile& ini, std::vector<ConfigIssue>& issues) : issues_(issues) {
    for (const auto& e : ini.entries) {
      const auto sec = schema().find(e.section);
      if (sec == schema().end()) {
        issue(ConfigIssue::Kind::Unknown, e.line, e.section, "unknown section [" + e.section + "]");
        continue;
      }
      if (!sec->second.count(e.key)) {
        issue(ConfigIssue::Kind::Unknown, e.line, e.section + "." + e.key, "unknown key");
        continue;
      }
      const std::string field = e.section + "." + e.key;
      if (field != "dislocations.dislocation" && values_.count(field))
        issue(ConfigIssue::Kind::Syntax, e.line, field, "duplicate key (first on line " +
                                                            std::to_string(values_[field].front().line) + ")");
      values_[field].push_back(e);
    }
  }

  void issue(ConfigIssue::Kind k, int line, const std::string& field, const std::string& msg) {
    issues_.push_back({k, line, field, msg});
  }

  const IniEntry* find(const std::string& field) const {
    auto it = values_.find(field);
    return it == values_.end() ? nullptr : &it->second.front();
  }
  std::vector<IniEntry> all(const std::string& field) const {
    auto it = values_.find(field);
    return it == values_.end() ? std::vector<IniEntry>{} : it->second;
  }

  void number(const std::string& field, double& out) {
    if (const IniEntry* e = find(field)) {
      if (auto v = to_double(e->value)) out = *v;
      else issue(ConfigIssue::Kind::Type, e->line, field, "expected a number, got '" + e->value + "'");
    }
  }
  void integer(const std::string& field, int& out) {
    if (const IniEntry* e = find(field)) {
      if (auto v = to_integer(e->value); v && *v >= INT32_MIN && *v <= INT32_MAX) out = static_cast<int>(*v);
      else issue(ConfigIssue::Kind::Type, e->line, field, "expected an integer, got '" + e->value + "'");
    }
  }
  void boolean(const std::string& field, bool& out) {
    if (const IniEntry* e = find(field)) {
      if (e->value == "true" || e->value == "1" || e->value == "yes") out = true;
      else if (e->value == "false" || e->value == "0" || e->value == "no") out = false;
      else issue(ConfigIssue::Kind::Type, e->line, field, "expected true or false, got '" + e->value + "'");
    }
  }
  void text(const std::string& field, std::string& out) {
    if (const IniEntry* e = find(field)) out = e->value;
  }
  /// Whitespace/comma separated numbers; `count` < 0 accepts any positive count.
  bool numbers(const IniEntry& e, const std::string& field, int count, std::vector<double>& out) {
    out.clear();
    const auto words = split_words(e.value);
    for (const auto& w : words) {
      auto v = to_double(w);
      if (!v) {
        issue(ConfigIssue::Kind::Type, e.line, field, "expected numbers, got '" + w + "'");
        return false;
      }
      out.push_back(*v);
    }
    if ((count >= 0 && static_cast<int>(out.size()) != count) || (count < 0 && out.empty())) {
      issue(ConfigIssue::Kind::Type, e.line, field,
            count >= 0 ? "expected " + std::to_string(count) + " numbers" : "expected at least one number");
      return false;
    }
    return true;
  }
  bool numbers(const std::string& field, int count, std::vector<double>& out) {
    const IniEntry* e = find(field);
    return e && numbers(*e, field, count, out);
  }
  int line(const std::string& field) const {
    const IniEntry* e = find(field);
    return e ? e->line : 0;
  }

 private:
  std::vector<ConfigIssue>& issues_;
  std::map<std::string, std::vector<IniEntry>> values_;
};

bool is_integer(double v) { return std::abs(v - std::round(v)) == 0.0 && std::abs(v) < 1e9; }

}  // namespace

IniFile parse_ini(const std::string& text) {
  IniFile out;
  std::istringstream in(text);
  std::string section;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto c = raw.find_first_of("#;"); c != std::string::npos) raw.erase(c);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        out.syntax_errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      out.syntax_errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
      continue;
    }
    IniEntry e{section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), lineno};
    if (e.key.empty()) {
      out.syntax_errors.push_back("line " + std::to_string(lineno) + ": empty key");
      continue;
    }
    if (section.empty()) {
      out.syntax_errors.push_back("line " + std::to_string(lineno) + ": key outside any section");
      continue;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

std::string to_string(const ConfigIssue& issue) {
  static const char* names[] = {"syntax", "missing", "type", "range", "unknown", "file", "separation"};
  std::string s;
  if (issue.line > 0) s += "line " + std::to_string(issue.line) + ": ";
  s += names[static_cast<int>(issue.kind)];
  if (!issue.field.empty()) s += " error in " + issue.field;
  return s + ": " + issue.message;
}

namespace {
std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string s = "invalid configuration";
  for (const auto& i : issues) s += "\n  " + to_string(i);
  return s;
}
}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

bool ConfigError::has(ConfigIssue::Kind kind) const {
  return std::any_of(issues_.begin(), issues_.end(), [&](const ConfigIssue& i) { return i.kind == kind; });
}

DislocationMeasure RunConfig::measure() const {
  DislocationMeasure mu;
  mu.entries = dislocations;
  mu.epsilon = epsilon;
  mu.gamma = gamma;
  return mu;
}

ScalingStudy RunConfig::scaling_study(int threads) const {
  ScalingStudy s;
  s.domain = domain;
  s.dislocations = dislocations;
  s.frame_angle = frame_angle;
  s.far_field = FarField::uniform_field(far_field);
  s.epsilons = ladder;
  s.gamma = gamma;
  s.potentials = potentials;
  s.grad_tol = grad_tol;
  s.max_iter = max_iter;
  s.threads = threads;
  s.profile_order = profile_order;
  return s;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  using K = ConfigIssue::Kind;
  std::vector<ConfigIssue> issues;
  const IniFile ini = parse_ini(text);
  for (const auto& s : ini.syntax_errors) {
    const auto colon = s.find(':');
    issues.push_back({K::Syntax, std::stoi(s.substr(5, colon - 5)), "", s.substr(colon + 2)});
  }
  Reader r(ini, issues);
  RunConfig c;
  c.source_text = text;

  // [lattice]
  r.number("lattice.epsilon", c.epsilon);
  if (!(c.epsilon > 0.0)) r.issue(K::Range, r.line("lattice.epsilon"), "lattice.epsilon", "must be > 0");
  else if (c.epsilon > 0.5) r.issue(K::Range, r.line("lattice.epsilon"), "lattice.epsilon", "must be <= 1/2");
  r.number("lattice.gamma", c.gamma);
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) r.issue(K::Range, r.line("lattice.gamma"), "lattice.gamma", "must lie in (0, 1)");
  r.text("lattice.domain", c.domain_label);
  bool domain_ok = true;
  if (c.domain_label == "hexagon") {
    double radius = 1.0;
    r.number("lattice.radius", radius);
    if (radius > 0.0) c.domain = regular_polygon(6, radius);
    else r.issue(K::Range, r.line("lattice.radius"), "lattice.radius", "must be > 0"), domain_ok = false;
  } else if (c.domain_label == "square") {
    double h = 0.5;
    r.number("lattice.half_width", h);
    if (h > 0.0) c.domain = axis_square(-h, h);
    else r.issue(K::Range, r.line("lattice.half_width"), "lattice.half_width", "must be > 0"), domain_ok = false;
  } else if (c.domain_label == "polygon") {
    std::string file;
    r.text("lattice.polygon_file", file);
    if (file.empty()) {
      r.issue(K::Missing, r.line("lattice.domain"), "lattice.polygon_file", "required when domain = polygon");
      domain_ok = false;
    } else {
      const std::filesystem::path p = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base_dir / file;
      if (!std::filesystem::exists(p)) {
        r.issue(K::File, r.line("lattice.polygon_file"), "lattice.polygon_file", "file not found: " + p.string());
        domain_ok = false;
      } else {
        try {
          c.domain = read_polygon(p);
        } catch (const std::exception& e) {
          r.issue(K::File, r.line("lattice.polygon_file"), "lattice.polygon_file", e.what());
          domain_ok = false;
        }
      }
    }
  } else {
    r.issue(K::Range, r.line("lattice.domain"), "lattice.domain", "expected hexagon, square or polygon");
    domain_ok = false;
  }

  // [potentials]
  {
    std::string name = "quadratic";
    double a1 = 2.0, a2 = 2.0;
    r.text("potentials.name", name);
    r.number("potentials.alpha1", a1);
    r.number("potentials.alpha2", a2);
    if (!(a1 > 0.0)) r.issue(K::Range, r.line("potentials.alpha1"), "potentials.alpha1", "must be > 0");
    if (!(a2 > 0.0)) r.issue(K::Range, r.line("potentials.alpha2"), "potentials.alpha2", "must be > 0");
    try {
      if (a1 > 0.0 && a2 > 0.0) c.potentials = potential_by_name(name, a1, a2);
    } catch (const std::exception& e) {
      r.issue(K::Range, r.line("potentials.name"), "potentials.name", e.what());
    }
  }

  r.number("frame.angle", c.frame_angle);

  // [dislocations]
  for (const auto& e : r.all("dislocations.dislocation")) {
    std::vector<double> v;
    const auto words = split_words(e.value);
    if (words.size() != 4 && words.size() != 5) {
      r.issue(K::Type, e.line, "dislocations.dislocation", "expected 'x y b1 b2 [theta]'");
      continue;
    }
    if (!r.numbers(e, "dislocations.dislocation", static_cast<int>(words.size()), v)) continue;
    if (!is_integer(v[2]) || !is_integer(v[3])) {
      r.issue(K::Type, e.line, "dislocations.dislocation", "Burgers coordinates b1 b2 must be integers");
      continue;
    }
    Dislocation d;
    d.position = Vec2(v[0], v[1]);
    d.burgers = Eigen::Vector2i(static_cast<int>(v[2]), static_cast<int>(v[3]));
    d.theta = v.size() == 5 ? v[4] : c.frame_angle;
    if (d.burgers.isZero()) {
      r.issue(K::Range, e.line, "dislocations.dislocation", "Burgers vector must be nonzero");
      continue;
    }
    c.dislocations.push_back(d);
  }

  // [far_field]
  {
    std::vector<double> v;
    if (r.numbers("far_field.matrix", 4, v)) c.far_field << v[0], v[1], v[2], v[3];
  }

  // [solver]
  r.number("solver.grad_tol", c.grad_tol);
  if (r.find("solver.grad_tol") && !(c.grad_tol > 0.0))
    r.issue(K::Range, r.line("solver.grad_tol"), "solver.grad_tol", "must be > 0");
  r.integer("solver.max_iter", c.max_iter);
  if (c.max_iter < 0) r.issue(K::Range, r.line("solver.max_iter"), "solver.max_iter", "must be >= 0");
  r.integer("solver.memory", c.memory);
  if (c.memory < 1) r.issue(K::Range, r.line("solver.memory"), "solver.memory", "must be >= 1");
  r.boolean("solver.fixed_frame", c.fixed_frame);
  r.integer("solver.profile_order", c.profile_order);
  if (c.profile_order < 2 || c.profile_order > 64)
    r.issue(K::Range, r.line("solver.profile_order"), "solver.profile_order", "must lie in [2, 64]");

  const auto ladder = [&](const std::string& field, std::vector<double>& out) {
    std::vector<double> v;
    if (!r.numbers(field, -1, v)) return;
    for (double x : v)
      if (!(x > 0.0 && x <= 0.5)) {
        r.issue(K::Range, r.line(field), field, "every eps must lie in (0, 1/2]");
        return;
      }
    out = v;
  };
  ladder("scaling.epsilons", c.ladder);
  ladder("thin_annulus.epsilons", c.thin_ladder);

  {
    std::vector<double> v;
    if (r.numbers("selfenergy.zeta", 2, v)) c.zeta = Vec2(v[0], v[1]);
    if (c.zeta.isZero(0.0)) r.issue(K::Range, r.line("selfenergy.zeta"), "selfenergy.zeta", "must be nonzero");
    if (r.numbers("selfenergy.ratios", -1, v)) {
      bool ok = true;
      for (std::size_t k = 0; k < v.size(); ++k) ok = ok && v[k] > 1.0 && (k == 0 || v[k] > v[k - 1]);
      if (ok) c.ratios = v;
      else r.issue(K::Range, r.line("selfenergy.ratios"), "selfenergy.ratios", "must be increasing and > 1");
    }
    if (r.numbers("phi.burgers", 2, v)) {
      if (is_integer(v[0]) && is_integer(v[1])) c.burgers = Eigen::Vector2i(static_cast<int>(v[0]), static_cast<int>(v[1]));
      else r.issue(K::Type, r.line("phi.burgers"), "phi.burgers", "lattice coordinates must be integers");
    }
  }
  r.integer("phi.search_bound", c.search_bound);
  if (c.search_bound < 0) r.issue(K::Range, r.line("phi.search_bound"), "phi.search_bound", "must be >= 0");
  r.number("thin_annulus.m", c.thin_m);
  if (!(c.thin_m > 1.0)) r.issue(K::Range, r.line("thin_annulus.m"), "thin_annulus.m", "must be > 1");
  r.text("output.dir", c.output_dir);
  r.boolean("output.svg", c.write_svg);

  // Separation rules depend on eps and the domain, so they run last.
  if (domain_ok && c.epsilon > 0.0 && c.gamma > 0.0 && c.gamma < 1.0) {
    try {
      c.measure().validate(c.domain);
    } catch (const SeparationViolation& e) {
      r.issue(K::Separation, r.line("dislocations.dislocation"), "dislocations.dislocation", e.what());
    }
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({{ConfigIssue::Kind::File, 0, "", "cannot read config file " + path.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace dislo
