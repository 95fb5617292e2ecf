#include "dislo/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dislo {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const CsvTable& table) {
  const auto check = [](const std::string& cell) {
    if (cell.find_first_of(",\n\r\"") != std::string::npos)
      throw std::invalid_argument("csv cell contains a separator: " + cell);
  };
  std::string out;
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    check(table.header[k]);
    out += (k ? "," : "") + table.header[k];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw std::invalid_argument("csv row width does not match the header");
    for (std::size_t k = 0; k < row.size(); ++k) {
      check(row[k]);
      out += (k ? "," : "") + row[k];
    }
    out += '\n';
  }
  return out;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
  const std::string text = csv_text(table);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line));
    if (t.rows.back().size() != t.header.size())
      throw std::runtime_error(path.string() + ": row " + std::to_string(t.rows.size()) + " has the wrong width");
  }
  return t;
}

CsvTable scaling_table(const std::vector<StudyRow>& rows) {
  CsvTable t;
  t.header = {"epsilon",          "nodes",         "recovery_energy",      "minimized_energy",
              "normalized_recovery", "normalized_minimized", "gamma_limit", "max_annulus_distance",
              "iterations",       "converged"};
  for (const auto& r : rows)
    t.add(r.epsilon, r.nodes, r.recovery_energy, r.minimized_energy, r.normalized_recovery, r.normalized_minimized,
          r.gamma_limit, r.max_annulus_distance, r.iterations, r.converged);
  return t;
}

CsvTable thin_annulus_table(const ThinAnnulusResult& result) {
  CsvTable t;
  t.header = {"epsilon", "m", "energy", "energy_over_eps2", "thin_average_error", "l2_to_r1", "thick_average_error"};
  for (const auto& r : result.rows)
    t.add(r.epsilon, result.m, r.energy, r.energy / (r.epsilon * r.epsilon), r.thin_average_error, r.l2_to_r1,
          r.thick_average_error);
  return t;
}

CsvTable psi_table(const std::vector<PsiConvergenceRow>& rows) {
  CsvTable t;
  t.header = {"ratio", "psi_annulus", "psi_reference", "residual", "residual_times_log"};
  for (const auto& r : rows) t.add(r.ratio, r.psi_annulus, r.psi_reference, r.residual, r.residual_times_log);
  return t;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["tool"] = "dislo";
  j["version"] = kVersion;
  j["subcommand"] = m.subcommand;
  j["config_path"] = m.config_path;
  j["config_fnv1a"] = fnv1a_hex(m.config_text);
  j["threads"] = m.threads;
  j["seed"] = m.seed;
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  j["compiler"] = __VERSION__;
  j["outputs"] = m.outputs;
  j["timings_seconds"] = m.timings;
  j["notes"] = m.notes;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

}  // namespace dislo
