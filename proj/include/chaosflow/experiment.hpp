#pragma once

// Experiment plumbing: typed parameter tables per subcommand, config files,
// seeded runs writing CSV + a JSON run record, and parameter sweeps.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace chaosflow {

struct ConfigError : std::invalid_argument {
  ConfigError(const std::string& msg, std::string key = {})
      : std::invalid_argument(msg), key(std::move(key)) {}
  std::string key;
};

enum class ParamType { real, integer, boolean, text, choice };

struct ParamDef {
  std::string key;
  ParamType type = ParamType::real;
  std::string default_value;
  std::string help;
  std::vector<std::string> choices;  // ParamType::choice only
};

struct CommandDef {
  std::string name;
  std::string help;
  std::vector<ParamDef> params;  // shared keys (seed, out-dir) are added automatically
};

const std::vector<CommandDef>& command_table();
const CommandDef& find_command(const std::string& name);

/// Subcommand plus a fully populated, validated parameter map.
class ExperimentConfig {
 public:
  explicit ExperimentConfig(const std::string& command);

  const std::string& command() const { return command_; }
  /// Throws ConfigError naming the key if unknown or ill-typed.
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;
  bool explicitly_set(const std::string& key) const;

  double real(const std::string& key) const;
  long long integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::uint64_t seed() const;

  /// "key = value" lines, sorted by key; parse_config_text() reads them back.
  std::string echo() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  const ParamDef& def(const std::string& key) const;
  std::string command_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> explicit_;
};

/// Parses "key = value" lines ('#' comments, blank lines ignored).
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& file);

/// Root for run directories: $CHAOSFLOW_OUTPUT_ROOT or ./runs.
std::filesystem::path output_root();

/// Writes %.17g-formatted CSV with a header row and counts data rows.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_text(const std::vector<std::string>& values);
  std::size_t rows() const { return rows_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t rows_ = 0;
};

std::string format_real(double v);

/// Collects output files of a run for the manifest.
class RunContext {
 public:
  explicit RunContext(std::filesystem::path dir);
  const std::filesystem::path& dir() const { return dir_; }
  CsvWriter& csv(const std::string& name, const std::vector<std::string>& header);
  void note(const std::string& key, double value) { summary_[key] = value; }
  void note_text(const std::string& key, const std::string& value) { notes_[key] = value; }
  const std::map<std::string, double>& summary() const { return summary_; }
  const std::map<std::string, std::string>& notes() const { return notes_; }
  std::vector<std::pair<std::string, std::size_t>> manifest();

 private:
  std::filesystem::path dir_;
  std::vector<std::unique_ptr<CsvWriter>> files_;
  std::map<std::string, double> summary_;
  std::map<std::string, std::string> notes_;
};

struct RunRecord {
  std::string command;
  std::string version;
  std::uint64_t seed = 0;
  std::string config_echo;
  double wall_time_s = 0.0;
  std::filesystem::path dir;
  std::vector<std::pair<std::string, std::size_t>> files;
  std::map<std::string, double> summary;
  std::map<std::string, std::string> notes;

  std::string to_json() const;
};

/// Run directory used when out-dir is empty: <root>/<command>-<hash of echo>.
std::filesystem::path default_run_dir(const ExperimentConfig& cfg);

/// Executes the subcommand, writes CSVs, config.txt and run.json.
RunRecord run(const ExperimentConfig& cfg);

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};
/// "key=v1,v2,..."; throws ConfigError on an empty axis.
SweepAxis parse_axis(const std::string& spec);

struct SweepPoint {
  std::size_t index = 0;
  std::string value;
  bool ok = false;
  std::string error;
  std::filesystem::path dir;
  std::map<std::string, double> summary;
};

struct SweepResult {
  std::filesystem::path dir;
  std::vector<SweepPoint> points;
};

/// One run per axis value in <dir>/point-<i>, seed derive_seed(master, i),
/// plus summary.csv. Failing points are recorded and the sweep continues.
/// `threads` > 1 runs points concurrently; outputs do not depend on it.
SweepResult sweep(const ExperimentConfig& base, const SweepAxis& axis, const std::filesystem::path& dir,
                  unsigned threads = 1);

/// Dispatch table implemented in commands.cpp.
void execute_command(const ExperimentConfig& cfg, RunContext& ctx);

}  // namespace chaosflow
