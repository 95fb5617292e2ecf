#pragma once

#include "dislo/harness.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dislo {

inline constexpr const char* kVersion = "1.0.0";

/// 17 significant digits, so every double round-trips exactly.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Appends a row; numbers go through format_double.
  template <typename... T>
  void add(const T&... cells) {
    rows.push_back({cell(cells)...});
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
};

/// Header line plus one line per row. Throws std::invalid_argument for ragged
/// rows and std::runtime_error on I/O failure.
void emit_csv(const CsvTable& table, const std::filesystem::path& path);
std::string csv_text(const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

CsvTable scaling_table(const std::vector<StudyRow>& rows);
CsvTable thin_annulus_table(const ThinAnnulusResult& result);
CsvTable psi_table(const std::vector<PsiConvergenceRow>& rows);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

struct Manifest {
  std::string subcommand;
  std::string config_path;
  std::string config_text;
  int threads = 1;
  unsigned long long seed = 0;
  std::vector<std::string> outputs;
  std::map<std::string, double> timings;  // seconds
  std::map<std::string, std::string> notes;
};

/// JSON with the config hash, version and timings.
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace dislo
