#include "escort.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "escort/config.hpp"
#include "escort/simulator.hpp"
#include "json.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

esc_status fail(esc_status code, const std::string& msg) {
  set_error(msg);
  return code;
}

template <typename Fn>
esc_status guard(Fn&& fn) {
  try {
    return fn();
  } catch (const escort::ConfigError& e) {
    return fail(ESC_ERR_CONFIG, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ESC_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(ESC_ERR_RUNTIME, e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_csv(const char* text) {
  std::vector<std::string> out;
  if (text == nullptr) return out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

struct esc_config {
  escort::FullConfig cfg;
};

extern "C" {

const char* esc_version(void) { return "1.0.0"; }

const char* esc_last_error(void) { return g_last_error.c_str(); }

esc_config* esc_config_create(void) { return new (std::nothrow) esc_config(); }

void esc_config_destroy(esc_config* cfg) { delete cfg; }

esc_status esc_config_load_file(esc_config* cfg, const char* path) {
  if (cfg == nullptr || path == nullptr) return fail(ESC_ERR_CONFIG, "null argument");
  return guard([&]() {
    escort::FullConfig merged = cfg->cfg;
    // Re-parse onto the current values so the file only overrides what it sets.
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line, section;
    // parse_config starts from defaults; to layer on top of the current
    // config, apply the parsed result key-by-key is equivalent to parsing
    // with the current config as the base. Simplest correct route: parse to
    // validate, then replay the file through set_config_value.
    (void)escort::parse_config(text);
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find_first_of("#;");
      if (hash != std::string::npos) line = line.substr(0, hash);
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      const auto e = line.find_last_not_of(" \t\r");
      line = line.substr(b, e - b + 1);
      if (line.front() == '[') {
        section = line.substr(1, line.size() - 2);
        continue;
      }
      const auto eq = line.find('=');
      std::string key = line.substr(0, eq);
      std::string value = line.substr(eq + 1);
      const auto ke = key.find_last_not_of(" \t");
      key = key.substr(0, ke + 1);
      const auto vb = value.find_first_not_of(" \t");
      value = vb == std::string::npos ? "" : value.substr(vb);
      escort::set_config_value(merged, section + "." + key, value);
    }
    cfg->cfg = merged;
    return ESC_OK;
  });
}

esc_status esc_config_load_string(esc_config* cfg, const char* text) {
  if (cfg == nullptr || text == nullptr) return fail(ESC_ERR_CONFIG, "null argument");
  return guard([&]() {
    cfg->cfg = escort::parse_config(text);
    return ESC_OK;
  });
}

esc_status esc_config_set(esc_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) {
    return fail(ESC_ERR_CONFIG, "null argument");
  }
  return guard([&]() {
    escort::set_config_value(cfg->cfg, key, value);
    return ESC_OK;
  });
}

esc_status esc_config_validate(const esc_config* cfg) {
  if (cfg == nullptr) return fail(ESC_ERR_CONFIG, "null argument");
  return guard([&]() {
    escort::validate(cfg->cfg);
    return ESC_OK;
  });
}

char* esc_config_dump_json(const esc_config* cfg) {
  if (cfg == nullptr) return nullptr;
  try {
    return dup_string(escort::config_to_json(cfg->cfg));
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void esc_string_free(char* s) { std::free(s); }

esc_status esc_run_episode(const esc_config* cfg, const char* out_dir) {
  if (cfg == nullptr || out_dir == nullptr) return fail(ESC_ERR_CONFIG, "null argument");
  return guard([&]() {
    escort::validate(cfg->cfg);
    const escort::EpisodeLog log = escort::run_episode(cfg->cfg);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "episode.jsonl", escort::episode_to_jsonl(log));
    nlohmann::json manifest;
    manifest["kind"] = "episode";
    manifest["files"] = {"episode.jsonl"};
    manifest["config"] = nlohmann::json::parse(escort::config_to_json(cfg->cfg));
    manifest["verdict"] = escort::to_string(log.verdict);
    manifest["final_tick"] = log.final_tick;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return ESC_OK;
  });
}

esc_status esc_run_batch(const esc_config* cfg, const char* variants,
                         const char* escort_counts, int n_envs, int workers,
                         const char* out_dir) {
  if (cfg == nullptr || out_dir == nullptr) return fail(ESC_ERR_CONFIG, "null argument");
  return guard([&]() {
    escort::validate(cfg->cfg);
    const auto variant_list = split_csv(variants);
    if (variant_list.empty()) throw escort::ConfigError("no variants given");
    std::vector<int> escorts;
    for (const auto& s : split_csv(escort_counts)) {
      std::size_t pos = 0;
      const int n = std::stoi(s, &pos);
      if (pos != s.size() || n < 0) {
        throw escort::ConfigError("bad escort count: " + s);
      }
      escorts.push_back(n);
    }
    if (escorts.empty()) throw escort::ConfigError("no escort counts given");
    if (n_envs <= 0) throw escort::ConfigError("n_envs must be positive");

    const auto cells = escort::batch_evaluate(cfg->cfg, variant_list, escorts,
                                              n_envs, workers);
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "batch.csv", escort::batch_to_csv(cells));
    nlohmann::json manifest;
    manifest["kind"] = "batch";
    manifest["files"] = {"batch.csv"};
    manifest["config"] = nlohmann::json::parse(escort::config_to_json(cfg->cfg));
    manifest["variants"] = variant_list;
    manifest["escort_settings"] = escorts;
    manifest["n_envs"] = n_envs;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return ESC_OK;
  });
}

esc_status esc_replay(const char* log_path) {
  if (log_path == nullptr) return fail(ESC_ERR_CONFIG, "null argument");
  return guard([&]() {
    const escort::EpisodeLog log = escort::episode_from_jsonl(read_file(log_path));
    if (!escort::replay_matches(log)) {
      return fail(ESC_ERR_RUNTIME, "replay mismatch: logged states do not "
                                   "reproduce under the recorded controls");
    }
    return ESC_OK;
  });
}

}  // extern "C"
