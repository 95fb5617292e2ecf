#pragma once

#include "dislo/harness.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dislo {

/// Line-oriented `key = value` file with `[section]` headers. `#` and `;`
/// start comments. A key may repeat inside a section (dislocation lists).
struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

struct IniFile {
  std::vector<IniEntry> entries;
  std::vector<std::string> syntax_errors;  // "line N: ..."
};

IniFile parse_ini(const std::string& text);

struct ConfigIssue {
  enum class Kind { Syntax, Missing, Type, Range, Unknown, File, Separation };
  Kind kind;
  int line = 0;       // 0 when the issue is not tied to one line
  std::string field;  // section.key
  std::string message;
};

std::string to_string(const ConfigIssue& issue);

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }
  bool has(ConfigIssue::Kind kind) const;

 private:
  std::vector<ConfigIssue> issues_;
};

struct RunConfig {
  // [lattice]
  double epsilon = 1.0 / 64;
  double gamma = 0.5;
  Polygon domain = regular_polygon(6, 1.0);
  std::string domain_label = "hexagon";
  // [potentials]
  PotentialPair potentials = PotentialPair::quadratic();
  // [frame]
  double frame_angle = 0.0;
  // [dislocations]
  std::vector<Dislocation> dislocations;
  // [far_field]
  Mat2 far_field = Mat2::Zero();
  // [solver]
  double grad_tol = -1.0;
  int max_iter = 20000;
  int memory = 10;
  bool fixed_frame = true;
  int profile_order = 8;
  // [scaling]
  std::vector<double> ladder = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256, 1.0 / 512};
  // [selfenergy]
  Vec2 zeta = Vec2(1.0, 0.0);
  std::vector<double> ratios = {1e2, 1e3};
  // [phi]
  Eigen::Vector2i burgers = Eigen::Vector2i(1, 0);
  int search_bound = 0;
  // [thin_annulus]
  double thin_m = 4.0;
  std::vector<double> thin_ladder = {1.0 / 32, 1.0 / 64, 1.0 / 128, 1.0 / 256};
  // [output]
  std::string output_dir = "out";
  bool write_svg = true;

  std::string source_text;  // for the manifest hash

  DislocationMeasure measure() const;
  ScalingStudy scaling_study(int threads) const;
};

/// Parses and validates; throws ConfigError listing every problem found.
/// Relative paths resolve against `base_dir`.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace dislo
