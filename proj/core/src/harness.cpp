#include "thinshell/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace thinshell::harness {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& text, const std::string& key, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number for '" + key + "': " + text, line);
  }
}

std::vector<double> parse_real_list(const std::string& value, const std::string& key, int line) {
  std::vector<double> out;
  for (const std::string& item : split_list(value)) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(parse_number(item, key, line));
      continue;
    }
    std::vector<std::string> parts;
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(trim(part));
    if (parts.size() != 3) throw ConfigError("range for '" + key + "' must be start:stop:step", line);
    const double start = parse_number(parts[0], key, line);
    const double stop = parse_number(parts[1], key, line);
    const double step = parse_number(parts[2], key, line);
    if (!(step > 0.0) || stop < start) throw ConfigError("empty or invalid range for '" + key + "'", line);
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start + static_cast<double>(i) * step);
  }
  if (out.empty()) throw ConfigError("'" + key + "' must not be empty", line);
  return out;
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key, int line) {
  std::vector<int> out;
  for (double v : parse_real_list(value, key, line)) {
    if (v != std::floor(v)) throw ConfigError("'" + key + "' must contain integers", line);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

nlohmann::ordered_json scalar_json(const Scalar& value) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, value);
}

std::string join_parameters(const std::vector<std::pair<std::string, Scalar>>& params) {
  std::string out;
  for (const auto& [k, v] : params) {
    if (!out.empty()) out += ';';
    out += k + '=' + format_scalar(v);
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << content;
  if (!os) throw std::runtime_error("cannot write " + path.string());
}

std::optional<std::size_t> column_index(const Table& table, std::string_view name) {
  const auto it = std::find(table.columns.begin(), table.columns.end(), name);
  if (it == table.columns.end()) return std::nullopt;
  return static_cast<std::size_t>(it - table.columns.begin());
}

double as_double(const Scalar& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  throw std::invalid_argument("non-numeric table cell");
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::optional<std::string> ExperimentConfig::get(const std::string& key) const {
  const auto it = raw.find(key);
  if (it == raw.end()) return std::nullopt;
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_number(*v, key, 0) : fallback;
}

int ExperimentConfig::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  const double d = parse_number(*v, key, 0);
  if (d != std::floor(d)) throw ConfigError("'" + key + "' must be an integer");
  return static_cast<int>(d);
}

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
  const auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig config;
  std::map<std::string, int> seen;
  std::string section;
  std::stringstream ss{std::string(text)};
  std::string raw_line;
  int line = 0;
  while (std::getline(ss, raw_line)) {
    ++line;
    std::string l = trim(raw_line);
    if (l.empty() || l[0] == '#' || l[0] == ';') continue;
    if (l.front() == '[') {
      if (l.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(std::string_view(l).substr(1, l.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line);
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    const std::string key = trim(std::string_view(l).substr(0, eq));
    std::string value = trim(std::string_view(l).substr(eq + 1));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = trim(std::string_view(value).substr(0, hash));
    if (key.empty()) throw ConfigError("missing key", line);
    const bool main_section = section.empty() || section == "experiment";
    const std::string qualified = main_section ? key : section + "." + key;
    if (const auto it = seen.find(qualified); it != seen.end())
      throw ConfigError("duplicate key '" + qualified + "' (first set on line " + std::to_string(it->second) + ")", line);
    seen[qualified] = line;
    config.raw[qualified] = value;

    if (section == "tolerances") {
      config.tolerances[key] = parse_number(value, qualified, line);
      continue;
    }
    if (!main_section) continue;
    if (key == "experiment") {
      config.experiment = value;
    } else if (key == "family") {
      config.family = value;
    } else if (key == "n" || key == "n_grid") {
      config.n_grid = parse_int_list(value, key, line);
      for (int n : config.n_grid)
        if (n < 1) throw ConfigError("'" + key + "' entries must be positive", line);
    } else if (key == "N") {
      const double v = parse_number(value, key, line);
      if (v != std::floor(v) || v < 0) throw ConfigError("'N' must be a non-negative integer", line);
      config.N = static_cast<std::size_t>(v);
    } else if (key == "seed") {
      try {
        std::size_t used = 0;
        config.seed = std::stoull(value, &used, 0);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw ConfigError("invalid seed: " + value, line);
      }
    } else if (key == "p_grid" || key == "p") {
      config.p_grid = parse_real_list(value, key, line);
    } else if (key == "t_grid") {
      config.t_grid = parse_real_list(value, key, line);
    } else if (key == "k_list" || key == "k") {
      config.k_list = parse_int_list(value, key, line);
    } else if (key == "output_dir" || key == "out") {
      config.output_dir = value;
    }
  }
  if (config.N && *config.N < 1000) throw ConfigError("validation: 'N' must be at least 1000");
  return config;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << is.rdbuf();
  return parse_config_text(buffer.str());
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass:
      return "pass";
    case Verdict::fail:
      return "fail";
    case Verdict::report_only:
      return "report-only";
  }
  return "report-only";
}

bool ExperimentResult::any_failure() const {
  return std::any_of(records.begin(), records.end(), [](const ReportRecord& r) { return r.verdict == Verdict::fail; });
}

std::string_view code_version() { return THINSHELL_VERSION; }

const ExperimentInfo& find_experiment(std::string_view key) {
  for (const auto& info : registry())
    if (info.key == key) return info;
  throw UnknownExperiment("unknown experiment: " + std::string(key));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const ExperimentInfo& info = find_experiment(config.experiment);
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result = info.run(config);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& record : result.records) {
    record.experiment = info.key;
    if (record.anchor.empty()) record.anchor = info.anchor;
    record.code_version = std::string(code_version());
    record.seed = config.seed;
    record.wall_time_s = elapsed;
  }
  return result;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_scalar(const Scalar& value) {
  struct Visitor {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const {
      if (std::isnan(v)) return "nan";
      if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return buf;
    }
    std::string operator()(const std::string& v) const { return v; }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  };
  return std::visit(Visitor{}, value);
}

double paouris_form(double n_bar, double alpha, double t) { return std::exp(-std::pow(n_bar, alpha / 2.0) * t); }

double klartag_form(int n, double t) { return std::exp(-std::cbrt(static_cast<double>(n)) * std::pow(t, 10.0 / 3.0)); }

double fleury_upper_form(int n, double t) { return std::exp(-std::pow(static_cast<double>(n), 0.25) * t * t); }

double fleury_lower_form(int n, double t) { return std::exp(-std::pow(static_cast<double>(n), 0.125) * t); }

std::vector<std::filesystem::path> emit_report(const ExperimentResult& result, const std::filesystem::path& out_dir,
                                               const EmitOptions& options) {
  if (result.records.empty()) throw std::invalid_argument("emit_report: empty record stream");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir))
    throw std::runtime_error("emit_report: output directory is not writable: " + out_dir.string());
  std::vector<std::filesystem::path> written;

  std::string jsonl;
  for (const auto& r : result.records) {
    nlohmann::ordered_json j;
    j["experiment"] = r.experiment;
    j["claim"] = r.claim;
    j["anchor"] = r.anchor;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.parameters) params[k] = scalar_json(v);
    j["parameters"] = params;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = scalar_json(v);
    j["metrics"] = metrics;
    j["verdict"] = std::string(to_string(r.verdict));
    j["wall_time_s"] = r.wall_time_s;
    j["code_version"] = r.code_version;
    j["seed"] = r.seed;
    jsonl += j.dump() + '\n';
  }
  written.push_back(out_dir / "records.jsonl");
  write_file(written.back(), jsonl);

  std::string csv = "experiment,claim,verdict,seed,code_version,parameters,metric,value\r\n";
  for (const auto& r : result.records) {
    const std::string prefix = csv_field(r.experiment) + ',' + csv_field(r.claim) + ',' +
                               std::string(to_string(r.verdict)) + ',' + std::to_string(r.seed) + ',' +
                               csv_field(r.code_version) + ',' + csv_field(join_parameters(r.parameters)) + ',';
    if (r.metrics.empty()) csv += prefix + ",\r\n";
    for (const auto& [k, v] : r.metrics) csv += prefix + csv_field(k) + ',' + csv_field(format_scalar(v)) + "\r\n";
  }
  written.push_back(out_dir / "records.csv");
  write_file(written.back(), csv);

  std::string summary;
  std::size_t passed = 0, failed = 0, reported = 0;
  for (const auto& r : result.records) {
    summary += std::string(to_string(r.verdict)) + "  " + r.experiment + " / " + r.claim + "\n    anchor: " + r.anchor;
    const std::string params = join_parameters(r.parameters);
    if (!params.empty()) summary += "\n    parameters: " + params;
    summary += '\n';
    passed += r.verdict == Verdict::pass;
    failed += r.verdict == Verdict::fail;
    reported += r.verdict == Verdict::report_only;
  }
  summary += "\n" + std::to_string(passed) + " pass, " + std::to_string(failed) + " fail, " + std::to_string(reported) +
             " report-only\n";
  written.push_back(out_dir / "summary.txt");
  write_file(written.back(), summary);

  for (const Table& table : result.tables) {
    Table t = table;
    const auto n_col = column_index(t, "n");
    const auto nbar_col = column_index(t, "n_bar");
    const auto alpha_col = column_index(t, "alpha");
    const auto t_col = column_index(t, "t");
    if (options.overlays && n_col && nbar_col && alpha_col && t_col) {
      t.columns.insert(t.columns.end(), {"paouris_form", "klartag_form", "fleury_upper_form", "fleury_lower_form"});
      for (auto& row : t.rows) {
        const int n = static_cast<int>(as_double(row[*n_col]));
        const double tv = as_double(row[*t_col]);
        row.emplace_back(paouris_form(as_double(row[*nbar_col]), as_double(row[*alpha_col]), tv));
        row.emplace_back(klartag_form(n, tv));
        row.emplace_back(fleury_upper_form(n, tv));
        row.emplace_back(fleury_lower_form(n, tv));
      }
    }
    std::string out = "# thinshell table " + t.name + " schema 1\r\n";
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + csv_field(t.columns[c]);
    out += "\r\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + csv_field(format_scalar(row[c]));
      out += "\r\n";
    }
    written.push_back(out_dir / (t.name + ".csv"));
    write_file(written.back(), out);
  }
  return written;
}

}  // namespace thinshell::harness
