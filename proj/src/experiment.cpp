#include "chaosflow/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <thread>

#include "chaosflow/rng.hpp"

namespace chaosflow {

namespace {

using T = ParamType;

ParamDef real(std::string k, std::string d, std::string h) { return {std::move(k), T::real, std::move(d), std::move(h), {}}; }
ParamDef integer(std::string k, std::string d, std::string h) {
  return {std::move(k), T::integer, std::move(d), std::move(h), {}};
}
ParamDef flag(std::string k, std::string d, std::string h) { return {std::move(k), T::boolean, std::move(d), std::move(h), {}}; }
ParamDef choice(std::string k, std::string d, std::string h, std::vector<std::string> c) {
  return {std::move(k), T::choice, std::move(d), std::move(h), std::move(c)};
}

// ħ is given by exactly one of these; the first explicitly set one wins,
// otherwise hbar-frac.
std::vector<ParamDef> hbar_params(const std::string& frac_default) {
  return {real("hbar-frac", frac_default, "hbar = 2*pi*r/G with G the inverse golden ratio"),
          real("hbar-over-2pi", "0", "hbar = 2*pi*value (overrides hbar-frac when set)"),
          real("hbar", "0", "hbar directly (overrides the other two when set)")};
}

std::vector<CommandDef> build_table() {
  std::vector<CommandDef> t;
  t.push_back({"bernoulli", "Bernoulli shift: float orbit next to its exact binary-shift code",
               {real("x0", "0.1415926535897932", "initial point in [0,1)"), integer("steps", "60", "iterations"),
                integer("bits", "52", "code length N (1..62)")}});
  t.push_back({"baker", "Baker / dissipative baker ensemble: coarse entropy, occupied cells, box dimension",
               {real("a", "1", "contraction factor in (0,1]; 1 is the conservative map"),
                integer("steps", "10", "iterations"), integer("n-points", "1000000", "cloud size"),
                integer("grid", "64", "coarse-graining grid per axis"),
                choice("init", "strip", "initial cloud", {"strip", "uniform"}),
                flag("dimension", "true", "estimate the box-counting dimension of the final cloud")}});
  t.push_back({"standard-map", "Ensemble of the (noisy, damped) standard map",
               {real("K", "10", "kick strength"), real("lambda", "0", "damping per step"),
                choice("noise", "none", "angle noise", {"none", "gaussian", "reset"}),
                real("nu", "0", "reset probability (noise=reset)"), real("variance", "0", "gaussian noise variance"),
                integer("steps", "100", "iterations"), integer("n-traj", "100000", "trajectories"),
                real("p0", "0", "initial momentum (angles uniform)"), real("dp", "1", "entropy resolution"),
                integer("threads", "1", "worker threads"),
                flag("fokker-planck", "false", "also integrate the Fokker-Planck equation with the fitted D"),
                flag("literal-fopl", "false", "use the literal drift/diffusion form in the Fokker-Planck run")}});
  t.push_back({"discrete", "Discrete Bernoulli/baker permutations and recurrence table",
               {integer("J", "8", "cells (power of two)"), integer("J-max", "1024", "largest J in the recurrence table")}});
  t.push_back({"qbaker", "Quantum baker map return probability",
               {integer("J", "8", "Hilbert space dimension (even)"), integer("steps", "500", "largest n"),
                choice("convention", "symmetric", "Fourier convention", {"symmetric", "plain"})}});
  {
    CommandDef c{"qkr", "Closed quantum kicked rotor against the classical standard map",
                 {real("K", "10", "kick strength"), integer("steps", "1000", "kicks"),
                  integer("L", "0", "basis half-width (0: automatic)"),
                  flag("literal-phase", "false", "use exp(-i hbar l^2) instead of exp(-i hbar l^2/2)"),
                  integer("n-traj", "100000", "classical reference trajectories")}};
    auto h = hbar_params("0.15");
    c.params.insert(c.params.end(), h.begin(), h.end());
    t.push_back(std::move(c));
  }
  {
    CommandDef c{"qkr-measured", "Continuously measured quantum kicked rotor against the noisy map",
                 {real("K", "5", "kick strength"), real("nu", "0.5", "measurement strength nu = 1 - exp(-gamma)"),
                  choice("mode", "full", "measured observable", {"full", "mean"}), integer("steps", "512", "kicks"),
                  integer("L", "256", "initial basis half-width (grows on leakage)"),
                  integer("entropy-every", "16", "von Neumann entropy cadence (0: off)"),
                  integer("n-traj", "100000", "classical trajectories"),
                  flag("literal-phase", "false", "use exp(-i hbar l^2)"),
                  flag("wigner", "false", "dump the final Wigner function")}};
    auto h = hbar_params("0.1");
    c.params.insert(c.params.end(), h.begin(), h.end());
    t.push_back(std::move(c));
  }
  {
    CommandDef c{"qkr-dissipative", "Damped quantum kicked rotor: stationary Wigner function vs Zaslavsky attractor",
                 {real("K", "5", "kick strength"), real("lambda", "0.3", "friction per period"),
                  real("nu", "0", "optional measurement strength (full distribution)"),
                  integer("steps", "300", "maximum kicks"), integer("L", "200", "basis half-width"),
                  flag("stop-when-stationary", "true", "stop once E changes < 1e-3 over 10 kicks"),
                  real("band-width", "3", "band half-width in units of hbar"),
                  integer("attractor-traj", "2000", "classical attractor trajectories"),
                  integer("entropy-every", "0", "von Neumann entropy cadence (0: off)")}};
    auto h = hbar_params("0");
    h[1].default_value = "0.02";
    c.params.insert(c.params.end(), h.begin(), h.end());
    t.push_back(std::move(c));
  }
  t.push_back({"spin-boson", "Spin coupled to truncated boson modes",
               {integer("N", "1", "boson modes"), integer("nmax", "40", "Fock truncation per mode"),
                real("g", "0.2", "coupling (N=1) or total coupling g/sqrt(N) per mode"),
                real("omega0", "1", "spin frequency"), real("omega1", "1", "mode frequency (N=1)"),
                real("omega-c", "1", "top of the mode ladder (N>1)"), real("T", "200", "duration"),
                real("dt", "0.01", "checkpoint interval"), integer("sign", "1", "cat sign +1/-1"),
                choice("boson-state", "vacuum", "initial boson state", {"vacuum", "random", "coherent"}),
                integer("boson-levels", "4", "levels used by boson-state=random"),
                real("alpha", "1", "coherent amplitude (boson-state=coherent)"),
                real("switch-threshold", "0.25", "hysteresis threshold for switching statistics"),
                choice("switch-component", "x", "Bloch component tracked for switching", {"x", "z"})}});
  t.push_back({"double-well", "Classical double well: basins, damped settling, finite-bath outcome statistics",
               {real("a", "0.25", "quadratic coefficient"), real("b", "0.01", "quartic coefficient"),
                real("lambda", "0.04", "friction"), integer("basin-grid", "128", "basin grid points per axis"),
                real("x-range", "10", "basin half-width in x"), real("p-range", "2", "basin half-width in p"),
                real("dt", "0.05", "time step"), real("T", "2000", "maximum time per trajectory"),
                integer("bath-N", "8", "bath oscillators"), real("bath-g", "0.02", "object-bath coupling"),
                real("bath-omega-lo", "0.5", "lowest bath frequency"),
                real("bath-omega-hi", "1.5", "highest bath frequency"),
                real("bath-temperature", "0.1", "bath sampling temperature"),
                integer("draws", "0", "bath draws from the origin (0: skip)")}});
  for (auto& c : t) {
    c.params.push_back(integer("seed", "1", "master seed"));
    c.params.push_back({"out-dir", T::text, "", "run directory (default: $CHAOSFLOW_OUTPUT_ROOT/<command>-<hash>)", {}});
  }
  return t;
}

bool parse_bool(const std::string& v, bool& out) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    out = true;
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    out = false;
    return true;
  }
  return false;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<CommandDef>& command_table() {
  static const std::vector<CommandDef> t = build_table();
  return t;
}

const CommandDef& find_command(const std::string& name) {
  for (const auto& c : command_table()) {
    if (c.name == name) return c;
  }
  throw ConfigError("unknown subcommand '" + name + "'", name);
}

ExperimentConfig::ExperimentConfig(const std::string& command) : command_(command) {
  for (const auto& p : find_command(command).params) values_[p.key] = p.default_value;
}

const ParamDef& ExperimentConfig::def(const std::string& key) const {
  for (const auto& p : find_command(command_).params) {
    if (p.key == key) return p;
  }
  throw ConfigError("unknown key '" + key + "' for " + command_, key);
}

void ExperimentConfig::set(const std::string& key, const std::string& raw) {
  const ParamDef& d = def(key);
  const std::string v = trim(raw);
  switch (d.type) {
    case ParamType::real: {
      char* end = nullptr;
      const double x = std::strtod(v.c_str(), &end);
      if (v.empty() || *end != '\0' || !std::isfinite(x)) throw ConfigError("'" + key + "' expects a real, got '" + v + "'", key);
      break;
    }
    case ParamType::integer: {
      char* end = nullptr;
      std::strtoll(v.c_str(), &end, 10);
      if (v.empty() || *end != '\0') throw ConfigError("'" + key + "' expects an integer, got '" + v + "'", key);
      break;
    }
    case ParamType::boolean: {
      bool b;
      if (!parse_bool(v, b)) throw ConfigError("'" + key + "' expects true/false, got '" + v + "'", key);
      values_[key] = b ? "true" : "false";
      explicit_[key] = true;
      return;
    }
    case ParamType::choice:
      if (std::find(d.choices.begin(), d.choices.end(), v) == d.choices.end()) {
        throw ConfigError("'" + key + "' has no choice '" + v + "'", key);
      }
      break;
    case ParamType::text:
      break;
  }
  values_[key] = v;
  explicit_[key] = true;
}

bool ExperimentConfig::has(const std::string& key) const { return values_.count(key) > 0; }
bool ExperimentConfig::explicitly_set(const std::string& key) const { return explicit_.count(key) > 0; }

double ExperimentConfig::real(const std::string& key) const {
  if (def(key).type != ParamType::real) throw ConfigError("'" + key + "' is not a real parameter", key);
  return std::strtod(values_.at(key).c_str(), nullptr);
}

long long ExperimentConfig::integer(const std::string& key) const {
  if (def(key).type != ParamType::integer) throw ConfigError("'" + key + "' is not an integer parameter", key);
  return std::strtoll(values_.at(key).c_str(), nullptr, 10);
}

bool ExperimentConfig::boolean(const std::string& key) const {
  if (def(key).type != ParamType::boolean) throw ConfigError("'" + key + "' is not a flag", key);
  return values_.at(key) == "true";
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  def(key);
  return values_.at(key);
}

std::uint64_t ExperimentConfig::seed() const { return static_cast<std::uint64_t>(integer("seed")); }

std::string ExperimentConfig::echo() const {
  std::ostringstream os;
  os << "# " << command_ << "\n";
  for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  for (const auto& [k, v] : parse_config_text(ss.str())) cfg.set(k, v);
}

std::filesystem::path output_root() {
  const char* env = std::getenv("CHAOSFLOW_OUTPUT_ROOT");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("runs");
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw std::logic_error("CSV row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_real(values[i]);
  out_ << "\n";
  ++rows_;
}

void CsvWriter::row_text(const std::vector<std::string>& values) {
  if (values.size() != columns_) throw std::logic_error("CSV row width mismatch in " + path_.string());
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << values[i];
  out_ << "\n";
  ++rows_;
}

RunContext::RunContext(std::filesystem::path dir) : dir_(std::move(dir)) { std::filesystem::create_directories(dir_); }

CsvWriter& RunContext::csv(const std::string& name, const std::vector<std::string>& header) {
  files_.push_back(std::make_unique<CsvWriter>(dir_ / name, header));
  return *files_.back();
}

std::vector<std::pair<std::string, std::size_t>> RunContext::manifest() {
  std::vector<std::pair<std::string, std::size_t>> m;
  for (const auto& f : files_) m.emplace_back(f->path().filename().string(), f->rows());
  return m;
}

std::string RunRecord::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = version;
  j["seed"] = seed;
  j["config"] = config_echo;
  j["wall_time_s"] = wall_time_s;
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& [name, rows] : files) j["files"].push_back({{"name", name}, {"rows", rows}});
  j["summary"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary) {
    if (std::isfinite(v)) {
      j["summary"][k] = v;
    } else {
      j["summary"][k] = nullptr;
    }
  }
  for (const auto& [k, v] : notes) j["notes"][k] = v;
  return j.dump(2) + "\n";
}

std::filesystem::path default_run_dir(const ExperimentConfig& cfg) {
  const std::string e = cfg.echo();
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (unsigned char ch : e) h = splitmix64(h ^ ch);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return output_root() / (cfg.command() + "-" + std::string(buf).substr(0, 10));
}

RunRecord run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string od = cfg.text("out-dir");
  RunContext ctx(od.empty() ? default_run_dir(cfg) : std::filesystem::path(od));
  {
    std::ofstream(ctx.dir() / "config.txt") << cfg.echo();
  }
  execute_command(cfg, ctx);
  RunRecord rec;
  rec.command = cfg.command();
  rec.version = CHAOSFLOW_VERSION;
  rec.seed = cfg.seed();
  rec.config_echo = cfg.echo();
  rec.dir = ctx.dir();
  rec.files = ctx.manifest();
  rec.summary = ctx.summary();
  rec.notes = ctx.notes();
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream(ctx.dir() / "run.json") << rec.to_json();
  return rec;
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("axis must look like key=v1,v2,...");
  SweepAxis ax;
  ax.key = trim(spec.substr(0, eq));
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) ax.values.push_back(item);
  }
  if (ax.key.empty()) throw ConfigError("axis key is empty");
  if (ax.values.empty()) throw ConfigError("axis '" + ax.key + "' has no values", ax.key);
  return ax;
}

SweepResult sweep(const ExperimentConfig& base, const SweepAxis& axis, const std::filesystem::path& dir,
                  unsigned threads) {
  if (axis.values.empty()) throw ConfigError("axis '" + axis.key + "' has no values", axis.key);
  if (axis.key == "seed" || axis.key == "out-dir") throw ConfigError("cannot sweep '" + axis.key + "'", axis.key);
  {
    // Validate key and every value before any run starts.
    ExperimentConfig probe = base;
    for (const auto& v : axis.values) probe.set(axis.key, v);
  }
  std::filesystem::create_directories(dir);
  SweepResult res;
  res.dir = dir;
  res.points.resize(axis.values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < axis.values.size(); i = next++) {
      SweepPoint& pt = res.points[i];
      pt.index = i;
      pt.value = axis.values[i];
      char name[32];
      std::snprintf(name, sizeof name, "point-%03zu", i);
      pt.dir = dir / name;
      try {
        ExperimentConfig cfg = base;
        cfg.set(axis.key, axis.values[i]);
        cfg.set("seed", std::to_string(static_cast<long long>(derive_seed(base.seed(), i) >> 1)));
        cfg.set("out-dir", pt.dir.string());
        const RunRecord rec = run(cfg);
        pt.summary = rec.summary;
        pt.ok = true;
      } catch (const std::exception& e) {
        pt.ok = false;
        pt.error = e.what();
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(axis.values.size())));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<std::string> keys;
  for (const auto& pt : res.points) {
    for (const auto& kv : pt.summary) keys.push_back(kv.first);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  std::vector<std::string> header{"index", axis.key, "status", "run_dir"};
  header.insert(header.end(), keys.begin(), keys.end());
  header.push_back("error");
  CsvWriter csv(dir / "summary.csv", header);
  for (const auto& pt : res.points) {
    std::vector<std::string> row{std::to_string(pt.index), pt.value, pt.ok ? "ok" : "failed", pt.dir.filename().string()};
    for (const auto& k : keys) {
      const auto it = pt.summary.find(k);
      row.push_back(it == pt.summary.end() ? "" : format_real(it->second));
    }
    std::string err = pt.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    row.push_back(err);
    csv.row_text(row);
  }
  return res;
}

}  // namespace chaosflow
