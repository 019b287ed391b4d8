#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <string>

#include "chaosflow/experiment.hpp"

namespace cf = chaosflow;

namespace {

int fail(const std::string& kind, const std::string& msg, const std::string& key = {}) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = msg;
  if (!key.empty()) j["key"] = key;
  std::cerr << j.dump() << "\n";
  return 2;
}

std::string type_name(cf::ParamType t) {
  switch (t) {
    case cf::ParamType::real: return "REAL";
    case cf::ParamType::integer: return "INT";
    case cf::ParamType::boolean: return "BOOL";
    case cf::ParamType::choice: return "CHOICE";
    default: return "TEXT";
  }
}

struct Sub {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> raw;
  std::string config;
};

cf::ExperimentConfig make_config(const std::string& name, Sub& s) {
  cf::ExperimentConfig cfg(name);
  if (!s.config.empty()) cf::apply_config_file(cfg, s.config);
  for (const auto& [key, value] : s.raw) {
    if (s.app->get_option("--" + key)->count() > 0) cfg.set(key, value);
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaosflow: chaotic maps, quantized maps and measurement models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(CHAOSFLOW_VERSION));

  std::map<std::string, Sub> subs;
  for (const auto& def : cf::command_table()) {
    Sub& s = subs[def.name];
    s.app = app.add_subcommand(def.name, def.help);
    s.app->add_option("--config", s.config, "plain-text key = value file (flags override it)");
    for (const auto& p : def.params) {
      std::string help = p.help + " [" + p.default_value + "]";
      if (p.type == cf::ParamType::choice) {
        help += " {";
        for (std::size_t i = 0; i < p.choices.size(); ++i) help += (i ? "," : "") + p.choices[i];
        help += "}";
      }
      s.app->add_option("--" + p.key, s.raw[p.key], help)->type_name(type_name(p.type));
    }
  }

  std::string target, axis, sweep_config, sweep_out;
  std::vector<std::string> sets;
  unsigned threads = 1;
  auto* sw = app.add_subcommand("sweep", "Run a subcommand over one parameter axis");
  sw->add_option("--target", target, "subcommand to sweep")->required();
  sw->add_option("--axis", axis, "key=v1,v2,...")->required();
  sw->add_option("--set", sets, "fixed key=value overrides (repeatable)");
  sw->add_option("--config", sweep_config, "plain-text config for the target");
  sw->add_option("--out", sweep_out, "sweep directory (default: <root>/sweep-<target>-<key>)");
  sw->add_option("--threads", threads, "points run concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (sw->parsed()) {
      cf::ExperimentConfig base(target);
      if (!sweep_config.empty()) cf::apply_config_file(base, sweep_config);
      for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw cf::ConfigError("--set expects key=value, got '" + kv + "'");
        base.set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      const auto ax = cf::parse_axis(axis);
      const std::filesystem::path dir =
          sweep_out.empty() ? cf::output_root() / ("sweep-" + target + "-" + ax.key) : std::filesystem::path(sweep_out);
      const auto res = cf::sweep(base, ax, dir, threads);
      std::size_t failed = 0;
      for (const auto& pt : res.points) failed += pt.ok ? 0 : 1;
      std::cout << res.dir.string() << "/summary.csv (" << res.points.size() << " points, " << failed
                << " failed)\n";
      return failed == 0 ? 0 : 1;
    }
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      const auto rec = cf::run(make_config(name, s));
      std::cout << rec.dir.string() << "\n";
      for (const auto& [k, v] : rec.summary) std::cout << "  " << k << " = " << cf::format_real(v) << "\n";
      return 0;
    }
  } catch (const cf::ConfigError& e) {
    return fail("config", e.what(), e.key);
  } catch (const std::exception& e) {
    return fail("runtime", e.what());
  }
  return 1;
}
