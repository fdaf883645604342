#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace thinshell::harness {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0);
  int line() const { return line_; }

 private:
  int line_ = 0;
};

class UnknownExperiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string experiment;
  // Comma-separated family names or "zoo"; empty selects the experiment default.
  std::string family;
  std::vector<int> n_grid;
  std::optional<std::size_t> N;
  std::uint64_t seed = 0;
  std::vector<double> p_grid;
  std::vector<double> t_grid;
  std::vector<int> k_list;
  std::filesystem::path output_dir;
  std::map<std::string, double> tolerances;
  // Every key as written, qualified "section.key" outside the top level.
  std::map<std::string, std::string> raw;

  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  double tolerance(const std::string& name, double fallback) const;
  std::size_t samples(std::size_t fallback) const { return N.value_or(fallback); }
  int n_or(int fallback) const { return n_grid.empty() ? fallback : n_grid.front(); }
};

// INI-style: [section] headers, key = value lines, '#' or ';' comments.
// Lists are comma separated; "a:b:step" expands to an arithmetic range.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(std::string_view text);

enum class Verdict { pass, fail, report_only };

std::string_view to_string(Verdict verdict);

using Scalar = std::variant<std::int64_t, double, std::string, bool>;

struct ReportRecord {
  std::string experiment;
  std::string claim;
  std::string anchor;
  std::vector<std::pair<std::string, Scalar>> parameters;
  std::vector<std::pair<std::string, Scalar>> metrics;
  Verdict verdict = Verdict::report_only;
  double wall_time_s = 0.0;
  std::string code_version;
  std::uint64_t seed = 0;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Scalar>> rows;
};

struct ExperimentResult {
  std::vector<ReportRecord> records;
  std::vector<Table> tables;

  bool any_failure() const;
};

struct ExperimentInfo {
  std::string key;
  std::string anchor;
  std::string description;
  std::function<ExperimentResult(const ExperimentConfig&)> run;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo& find_experiment(std::string_view key);

std::string_view code_version();

// Runs the registered experiment named in the config, stamping version, seed and timing.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct EmitOptions {
  bool overlays = false;
};

// records.jsonl, records.csv and summary.txt, plus one CSV per table.
std::vector<std::filesystem::path> emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir,
                                               const EmitOptions& options = {});

// RFC-4180 field quoting.
std::string csv_field(std::string_view text);
std::string format_scalar(const Scalar& value);

// Reference deviation curves for plotting, evaluated at (n, n̄, α, t).
double paouris_form(double n_bar, double alpha, double t);
double klartag_form(int n, double t);
double fleury_upper_form(int n, double t);
double fleury_lower_form(int n, double t);

}  // namespace thinshell::harness
