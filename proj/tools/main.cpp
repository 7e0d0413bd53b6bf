// escort: batch simulation front end for the escort planning library.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "escort.h"

namespace {

struct ConfigDeleter {
  void operator()(esc_config* c) const { esc_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<esc_config, ConfigDeleter>;

int status_to_exit(esc_status s) {
  switch (s) {
    case ESC_OK: return 0;
    case ESC_ERR_CONFIG: return 1;
    case ESC_ERR_RUNTIME: return 2;
  }
  return 2;
}

int report(esc_status s) {
  if (s != ESC_OK) std::fprintf(stderr, "error: %s\n", esc_last_error());
  return status_to_exit(s);
}

// One CLI flag bound to one "section.key" config entry.
struct KeyFlag {
  std::string key;
  std::string value;
  CLI::Option* opt = nullptr;
};

void add_key_flags(CLI::App* cmd, std::vector<KeyFlag>& flags,
                   bool with_escorts) {
  static const std::pair<const char*, const char*> kTable[] = {
      {"--seed", "scenario.seed"},
      {"--variant", "scenario.variant"},
      {"--escorts", "scenario.n_escorts"},
      {"--objects", "scenario.n_objects"},
      {"--env-size", "scenario.env_size"},
      {"--spawn-min", "scenario.spawn_min"},
      {"--spawn-max", "scenario.spawn_max"},
      {"--start-x", "scenario.start_x"},
      {"--start-y", "scenario.start_y"},
      {"--goal-x", "scenario.goal_x"},
      {"--goal-y", "scenario.goal_y"},
      {"--prior-var", "scenario.prior_var"},
      {"--v-pa", "scenario.v_pa"},
      {"--v-ea", "scenario.v_ea"},
      {"--dt", "agent.dt"},
      {"--horizon", "agent.horizon"},
      {"--u-max", "agent.u_max"},
      {"--sensor-range", "sensor.range"},
      {"--noise-var", "sensor.noise_var"},
      {"--p-o", "task.p_o"},
      {"--r-o", "task.r_o"},
      {"--r-d", "task.r_d"},
      {"--reach-every-step", "task.reach_every_step"},
      {"--n-mc", "task.n_mc"},
      {"--n-traj", "task.n_traj"},
      {"--log-floor", "task.log_floor"},
      {"--redraw-pa-samples", "task.redraw_pa_samples"},
      {"--cem-samples", "cem.n_samples"},
      {"--cem-elite", "cem.n_elite"},
      {"--cem-iters", "cem.n_inner_iters"},
      {"--cem-var-floor", "cem.var_floor"},
      {"--cem-var-terminate", "cem.var_terminate"},
      {"--cem-sigma0-sq", "cem.sigma0_sq"},
      {"--collision-radius", "sim.collision_radius"},
      {"--arrival-radius", "sim.arrival_radius"},
      {"--max-ticks", "sim.max_ticks"},
      {"--outer-rounds", "sim.outer_rounds"},
      {"--drop-prob", "sim.drop_prob"},
      {"--execute-mean", "sim.execute_mean"},
      {"--scheduler", "sim.scheduler"},
  };
  flags.reserve(std::size(kTable));
  for (const auto& [flag, key] : kTable) {
    if (!with_escorts && std::string(flag) == "--escorts") continue;
    flags.push_back({key, "", nullptr});
    flags.back().opt = cmd->add_option(flag, flags.back().value,
                                       std::string("sets ") + key);
  }
}

esc_status apply(esc_config* cfg, const std::string& config_path,
                 const std::vector<KeyFlag>& flags,
                 const std::vector<std::string>& sets) {
  if (!config_path.empty()) {
    const esc_status s = esc_config_load_file(cfg, config_path.c_str());
    if (s != ESC_OK) return s;
  }
  for (const auto& f : flags) {
    if (f.opt->count() == 0) continue;
    const esc_status s = esc_config_set(cfg, f.key.c_str(), f.value.c_str());
    if (s != ESC_OK) return s;
  }
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects section.key=value, got '%s'\n",
                   kv.c_str());
      return ESC_ERR_CONFIG;
    }
    const esc_status s = esc_config_set(cfg, kv.substr(0, eq).c_str(),
                                        kv.substr(eq + 1).c_str());
    if (s != ESC_OK) return s;
  }
  return esc_config_validate(cfg);
}

std::string default_out() {
  const char* env = std::getenv("ESCORT_OUT");
  return env != nullptr && *env != '\0' ? env : "out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinated-escort reach-avoid planning simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", esc_version());

  std::string config_path;
  std::string out_dir = default_out();
  std::vector<std::string> sets;

  auto* run = app.add_subcommand("run", "run one episode and log it");
  auto* batch = app.add_subcommand("batch", "paired batch over variants and escort counts");
  auto* replay = app.add_subcommand("replay", "verify a logged episode replays exactly");

  std::vector<KeyFlag> run_flags, batch_flags;
  for (CLI::App* cmd : {run, batch}) {
    cmd->add_option("--config", config_path, "config file");
    cmd->add_option("--out", out_dir, "output directory (env ESCORT_OUT)");
    cmd->add_option("--set", sets, "override section.key=value")
        ->take_all();
  }
  add_key_flags(run, run_flags, true);
  add_key_flags(batch, batch_flags, false);

  std::string variants = "blind,mi-ucb,si,se";
  std::string escort_counts = "2";
  int n_envs = 30;
  int workers = 1;
  batch->add_option("--variants", variants, "comma-separated reward variants");
  batch->add_option("--escorts", escort_counts,
                    "comma-separated escort counts");
  batch->add_option("--envs", n_envs, "paired environments per cell");
  batch->add_option("--workers", workers, "worker threads");

  std::string log_path;
  replay->add_option("log", log_path, "episode.jsonl to verify")->required();

  CLI11_PARSE(app, argc, argv);

  if (replay->parsed()) {
    const esc_status s = esc_replay(log_path.c_str());
    if (s == ESC_OK) std::printf("replay ok: %s\n", log_path.c_str());
    return report(s);
  }

  ConfigPtr cfg(esc_config_create());
  if (!cfg) {
    std::fprintf(stderr, "error: out of memory\n");
    return 1;
  }

  const auto& flags = run->parsed() ? run_flags : batch_flags;
  esc_status s = apply(cfg.get(), config_path, flags, sets);
  if (s != ESC_OK) return report(s);

  if (run->parsed()) {
    s = esc_run_episode(cfg.get(), out_dir.c_str());
    if (s == ESC_OK) std::printf("episode written to %s\n", out_dir.c_str());
  } else {
    s = esc_run_batch(cfg.get(), variants.c_str(), escort_counts.c_str(),
                      n_envs, workers, out_dir.c_str());
    if (s == ESC_OK) std::printf("batch written to %s\n", out_dir.c_str());
  }
  return report(s);
}
