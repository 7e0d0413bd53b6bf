#include "escort/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace escort {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Reached: return "reached";
    case Verdict::Collided: return "collided";
    case Verdict::Timeout: return "timeout";
  }
  return "?";
}

Scenario generate_scenario(const FullConfig& cfg, Rng& rng) {
  Scenario s;
  s.truth.reserve(cfg.n_objects);
  for (int i = 0; i < cfg.n_objects; ++i) {
    s.truth.emplace_back(rng.uniform(cfg.spawn_min, cfg.spawn_max),
                         rng.uniform(cfg.spawn_min, cfg.spawn_max));
  }
  const double sigma = std::sqrt(cfg.prior_var);
  std::vector<Eigen::Vector2d> means;
  means.reserve(cfg.n_objects);
  for (const auto& o : s.truth) {
    Eigen::Vector2d m = o + sigma * Eigen::Vector2d(rng.normal(), rng.normal());
    m.x() = std::clamp(m.x(), 0.0, cfg.env_size);
    m.y() = std::clamp(m.y(), 0.0, cfg.env_size);
    means.push_back(m);
  }
  s.prior = ObjectBelief::isotropic(means, cfg.prior_var);

  const Eigen::Vector2d start = cfg.start();
  const Eigen::Vector2d goal = cfg.goal();
  const double heading =
      (goal - start).norm() > 0.0
          ? std::atan2(goal.y() - start.y(), goal.x() - start.x())
          : 0.0;
  const int n_robots = 1 + cfg.n_escorts;
  s.starts.assign(n_robots, RobotState{start.x(), start.y(), heading});
  return s;
}

bool collision_check(const RobotState& from, const RobotState& to,
                     const ObjectSet& truth, double radius) {
  const double ax = from.x, ay = from.y;
  const double bx = to.x, by = to.y;
  const double dx = bx - ax, dy = by - ay;
  const double len_sq = dx * dx + dy * dy;
  for (const auto& o : truth) {
    double t = 0.0;
    if (len_sq > 0.0) {
      t = std::clamp(((o.x() - ax) * dx + (o.y() - ay) * dy) / len_sq, 0.0, 1.0);
    }
    const double cx = ax + t * dx - o.x();
    const double cy = ay + t * dy - o.y();
    if (cx * cx + cy * cy <= radius * radius) return true;
  }
  return false;
}

namespace {

constexpr std::uint64_t kScenarioStream = 1;
constexpr std::uint64_t kMeasurementStream = 2;
constexpr std::uint64_t kPlanStream = 3;
constexpr std::uint64_t kExchangeStream = 4;
constexpr std::uint64_t kExecStream = 5;
constexpr std::uint64_t kAsyncStream = 6;
constexpr std::uint64_t kEnvStream = 1000;

Rng plan_rng(const FullConfig& cfg, int tick, int round, int robot) {
  const std::uint64_t base = derive_seed(cfg.seed, kPlanStream);
  const std::uint64_t mix =
      (static_cast<std::uint64_t>(tick) << 32) ^
      (static_cast<std::uint64_t>(round) << 16) ^ static_cast<std::uint64_t>(robot);
  return Rng(derive_seed(base, mix));
}

struct World {
  std::vector<PlannerState> planners;
  std::vector<Mailbox> mailboxes;
  std::vector<int> ids;
  std::vector<double> last_rewards;
};

std::vector<PeerSnapshot> snapshot(const World& w) {
  std::vector<PeerSnapshot> peers;
  peers.reserve(w.planners.size());
  for (const auto& p : w.planners) {
    peers.push_back({p.id, p.role, p.state, p.params});
  }
  return peers;
}

// Synchronous rounds: every robot plans against the same mailbox state, then
// all broadcasts are exchanged at the round barrier.
void run_rounds_sync(World& w, const FullConfig& cfg, int tick, Rng& exch_rng) {
  const auto peers = snapshot(w);
  for (int round = 0; round < cfg.outer_rounds; ++round) {
    std::vector<DistributionMessage> msgs;
    msgs.reserve(w.planners.size());
    for (std::size_t i = 0; i < w.planners.size(); ++i) {
      Rng rng = plan_rng(cfg, tick, round, w.planners[i].id);
      msgs.push_back(plan_round(w.planners[i], w.mailboxes[i], peers, cfg, rng,
                                &w.last_rewards[i]));
      msgs.back().timestamp = tick * cfg.dt;
    }
    exchange(w.mailboxes, msgs, cfg.drop_prob, exch_rng, w.ids);
  }
}

// Event-driven rounds: each robot's planning slots are jittered inside the
// tick, and messages arrive with per-recipient latency. In-flight messages
// are delivered to a robot just before it plans.
void run_rounds_async(World& w, const FullConfig& cfg, int tick, Rng& async_rng,
                      std::vector<MessageEvent>& trace) {
  const auto peers = snapshot(w);
  const int n = static_cast<int>(w.planners.size());
  if (cfg.outer_rounds == 0 || n == 0) return;
  const double slot = cfg.dt / static_cast<double>(cfg.outer_rounds + 1);
  const double tick_start = tick * cfg.dt;

  struct PlanEvent {
    double time;
    int robot;  // index into w.planners
    int round;
  };
  std::vector<PlanEvent> events;
  for (int round = 0; round < cfg.outer_rounds; ++round) {
    for (int i = 0; i < n; ++i) {
      events.push_back({tick_start + (round + async_rng.uniform(0.0, 0.4)) * slot,
                        i, round});
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const PlanEvent& a, const PlanEvent& b) {
                     if (a.time != b.time) return a.time < b.time;
                     return a.robot < b.robot;
                   });

  struct InFlight {
    double deliver_at;
    int recipient;
    DistributionMessage msg;
  };
  std::vector<InFlight> in_flight;

  for (const auto& ev : events) {
    auto& box = w.mailboxes[ev.robot];
    for (auto it = in_flight.begin(); it != in_flight.end();) {
      if (it->recipient == ev.robot && it->deliver_at <= ev.time) {
        box.deliver(it->msg);
        it = in_flight.erase(it);
      } else {
        ++it;
      }
    }
    Rng rng = plan_rng(cfg, tick, ev.round, w.planners[ev.robot].id);
    DistributionMessage msg = plan_round(w.planners[ev.robot], box, peers, cfg,
                                         rng, &w.last_rewards[ev.robot]);
    msg.timestamp = ev.time;
    for (int i = 0; i < n; ++i) {
      if (i == ev.robot) continue;
      MessageEvent te{ev.time, -1.0, msg.sender, w.ids[i], msg.epoch};
      if (async_rng.uniform() < cfg.drop_prob) {
        trace.push_back(te);
        continue;
      }
      te.t_deliver = ev.time + async_rng.uniform(0.1, 1.2) * slot;
      in_flight.push_back({te.t_deliver, i, msg});
      trace.push_back(te);
    }
  }
  // Leftover messages land before the next tick's first plan event.
  for (const auto& f : in_flight) w.mailboxes[f.recipient].deliver(f.msg);
}

}  // namespace

EpisodeLog run_episode(const FullConfig& cfg) {
  validate(cfg);

  EpisodeLog log;
  log.config = cfg;

  Rng scen_rng(derive_seed(cfg.seed, kScenarioStream));
  const Scenario scenario = generate_scenario(cfg, scen_rng);
  log.truth = scenario.truth;
  log.initial_states = scenario.starts;

  const bool blind = cfg.variant == "blind";
  const RewardVariant ea_variant =
      blind ? RewardVariant::Blind : parse_variant(cfg.variant);

  World w;
  const int n_robots = 1 + cfg.n_escorts;
  for (int i = 0; i < n_robots; ++i) {
    PlannerState p;
    p.id = i;
    p.role = i == 0 ? Role::Principal : Role::Escort;
    p.variant = i == 0 ? RewardVariant::Blind : ea_variant;
    p.state = scenario.starts[i];
    p.params = i == 0 ? cfg.pa_params() : cfg.ea_params();
    p.dist = ControlDistribution::prior(cfg.horizon, cfg.cem.sigma0_sq);
    p.belief = scenario.prior;
    w.planners.push_back(std::move(p));
    w.ids.push_back(i);
  }
  w.mailboxes.resize(n_robots);
  w.last_rewards.assign(n_robots, 0.0);

  Rng meas_rng(derive_seed(cfg.seed, kMeasurementStream));
  Rng exch_rng(derive_seed(cfg.seed, kExchangeStream));
  Rng exec_rng(derive_seed(cfg.seed, kExecStream));
  Rng async_rng(derive_seed(cfg.seed, kAsyncStream));

  const Eigen::Vector2d goal = cfg.goal();
  auto pa_at_goal = [&](const RobotState& s) {
    return std::hypot(s.x - goal.x(), s.y - goal.y()) <= cfg.arrival_radius;
  };

  log.verdict = Verdict::Timeout;
  log.final_tick = 0;
  if (pa_at_goal(w.planners[0].state)) {
    log.verdict = Verdict::Reached;
    return log;
  }

  for (int tick = 0; tick < cfg.max_ticks; ++tick) {
    std::vector<Measurement> measurements;
    if (!blind) {
      for (int i = 1; i < n_robots; ++i) {
        auto ms = simulate_measurements(scenario.truth, w.planners[i].state,
                                        cfg.sensor(), meas_rng, tick);
        measurements.insert(measurements.end(), ms.begin(), ms.end());
      }
    }

    for (auto& p : w.planners) begin_tick(p, measurements, cfg);

    if (cfg.scheduler == "async") {
      run_rounds_async(w, cfg, tick, async_rng, log.trace);
    } else {
      run_rounds_sync(w, cfg, tick, exch_rng);
    }

    TickRecord rec;
    rec.tick = tick;
    rec.n_measurements = static_cast<int>(measurements.size());
    rec.rewards = w.last_rewards;
    const RobotState pa_prev = w.planners[0].state;
    for (auto& p : w.planners) {
      const double u = finish_tick(p, cfg, exec_rng);
      rec.controls.push_back(u);
      p.state = step(p.state, u, p.params);
      rec.states.push_back(p.state);
    }
    const auto& belief = w.planners[0].belief;
    for (int j = 0; j < belief.size(); ++j) {
      rec.belief_mean.push_back(belief.mean[j]);
      const Eigen::Matrix2d cov = belief.covariance(j);
      rec.belief_var.emplace_back(cov(0, 0), cov(1, 1));
    }
    log.ticks.push_back(std::move(rec));
    log.final_tick = tick + 1;

    if (collision_check(pa_prev, w.planners[0].state, scenario.truth,
                        cfg.collision_radius)) {
      log.verdict = Verdict::Collided;
      return log;
    }
    if (pa_at_goal(w.planners[0].state)) {
      log.verdict = Verdict::Reached;
      return log;
    }
  }
  log.verdict = Verdict::Timeout;
  return log;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json state_json(const RobotState& s) {
  return nlohmann::json{s.x, s.y, s.theta};
}

RobotState state_from_json(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

nlohmann::json vec2_json(const Eigen::Vector2d& v) {
  return nlohmann::json{v.x(), v.y()};
}

Eigen::Vector2d vec2_from_json(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace

std::string episode_to_jsonl(const EpisodeLog& log) {
  std::ostringstream out;
  {
    nlohmann::json h;
    h["type"] = "header";
    h["config"] = nlohmann::json::parse(config_to_json(log.config));
    h["truth"] = nlohmann::json::array();
    for (const auto& o : log.truth) h["truth"].push_back(vec2_json(o));
    h["initial_states"] = nlohmann::json::array();
    for (const auto& s : log.initial_states) h["initial_states"].push_back(state_json(s));
    out << h.dump() << "\n";
  }
  for (const auto& rec : log.ticks) {
    nlohmann::json t;
    t["type"] = "tick";
    t["tick"] = rec.tick;
    t["states"] = nlohmann::json::array();
    for (const auto& s : rec.states) t["states"].push_back(state_json(s));
    t["controls"] = rec.controls;
    t["rewards"] = rec.rewards;
    t["belief_mean"] = nlohmann::json::array();
    for (const auto& m : rec.belief_mean) t["belief_mean"].push_back(vec2_json(m));
    t["belief_var"] = nlohmann::json::array();
    for (const auto& v : rec.belief_var) t["belief_var"].push_back(vec2_json(v));
    t["n_measurements"] = rec.n_measurements;
    out << t.dump() << "\n";
  }
  for (const auto& ev : log.trace) {
    nlohmann::json m;
    m["type"] = "message";
    m["t_send"] = ev.t_send;
    m["t_deliver"] = ev.t_deliver;
    m["dropped"] = ev.t_deliver < 0.0;
    m["sender"] = ev.sender;
    m["recipient"] = ev.recipient;
    m["epoch"] = ev.epoch;
    out << m.dump() << "\n";
  }
  {
    nlohmann::json v;
    v["type"] = "verdict";
    v["verdict"] = to_string(log.verdict);
    v["final_tick"] = log.final_tick;
    out << v.dump() << "\n";
  }
  return out.str();
}

EpisodeLog episode_from_jsonl(const std::string& text) {
  EpisodeLog log;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string type = j.at("type");
    if (type == "header") {
      log.config = config_from_json(j.at("config").dump());
      for (const auto& o : j.at("truth")) log.truth.push_back(vec2_from_json(o));
      for (const auto& s : j.at("initial_states")) {
        log.initial_states.push_back(state_from_json(s));
      }
    } else if (type == "tick") {
      TickRecord rec;
      rec.tick = j.at("tick");
      for (const auto& s : j.at("states")) rec.states.push_back(state_from_json(s));
      rec.controls = j.at("controls").get<std::vector<double>>();
      rec.rewards = j.at("rewards").get<std::vector<double>>();
      for (const auto& m : j.at("belief_mean")) {
        rec.belief_mean.push_back(vec2_from_json(m));
      }
      for (const auto& v : j.at("belief_var")) {
        rec.belief_var.push_back(vec2_from_json(v));
      }
      rec.n_measurements = j.at("n_measurements");
      log.ticks.push_back(std::move(rec));
    } else if (type == "message") {
      MessageEvent ev;
      ev.t_send = j.at("t_send");
      ev.t_deliver = j.at("t_deliver");
      ev.sender = j.at("sender");
      ev.recipient = j.at("recipient");
      ev.epoch = j.at("epoch");
      log.trace.push_back(ev);
    } else if (type == "verdict") {
      const std::string v = j.at("verdict");
      log.verdict = v == "reached"   ? Verdict::Reached
                    : v == "collided" ? Verdict::Collided
                                      : Verdict::Timeout;
      log.final_tick = j.at("final_tick");
    }
  }
  return log;
}

bool replay_matches(const EpisodeLog& log) {
  std::vector<RobotState> states = log.initial_states;
  std::vector<AgentParams> params;
  params.push_back(log.config.pa_params());
  for (int i = 0; i < log.config.n_escorts; ++i) params.push_back(log.config.ea_params());
  if (states.size() != params.size()) return false;

  for (const auto& rec : log.ticks) {
    if (rec.controls.size() != states.size() || rec.states.size() != states.size()) {
      return false;
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
      states[i] = step(states[i], rec.controls[i], params[i]);
      const RobotState& logged = rec.states[i];
      if (states[i].x != logged.x || states[i].y != logged.y ||
          states[i].theta != logged.theta) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Batch

std::vector<BatchCell> batch_evaluate(const FullConfig& base,
                                      const std::vector<std::string>& variants,
                                      const std::vector<int>& escort_settings,
                                      int n_envs, int workers) {
  struct Job {
    FullConfig cfg;
    int cell = 0;
  };
  std::vector<BatchCell> cells;
  std::vector<Job> jobs;
  for (const auto& variant : variants) {
    parse_variant(variant);
    for (int n_esc : escort_settings) {
      BatchCell cell;
      cell.variant = variant;
      cell.n_escorts = n_esc;
      cell.n_episodes = n_envs;
      const int cell_idx = static_cast<int>(cells.size());
      cells.push_back(cell);
      for (int k = 0; k < n_envs; ++k) {
        Job job;
        job.cfg = base;
        job.cfg.variant = variant;
        // Blind runs no escorts regardless of the requested setting.
        job.cfg.n_escorts = variant == "blind" ? 0 : n_esc;
        job.cfg.seed = derive_seed(base.seed, kEnvStream + k);  // paired
        job.cell = cell_idx;
        jobs.push_back(std::move(job));
      }
    }
  }

  std::vector<Verdict> verdicts(jobs.size());
  std::vector<int> ticks(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker_fn = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      const EpisodeLog log = run_episode(jobs[i].cfg);
      verdicts[i] = log.verdict;
      ticks[i] = log.final_tick;
    }
  };
  const int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int i = 0; i < n_workers - 1; ++i) pool.emplace_back(worker_fn);
  worker_fn();
  for (auto& t : pool) t.join();

  std::vector<int> collided(cells.size(), 0), timed_out(cells.size(), 0),
      reached(cells.size(), 0), tick_sum(cells.size(), 0);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    switch (verdicts[i]) {
      case Verdict::Collided: collided[jobs[i].cell]++; break;
      case Verdict::Timeout: timed_out[jobs[i].cell]++; break;
      case Verdict::Reached:
        reached[jobs[i].cell]++;
        tick_sum[jobs[i].cell] += ticks[i];
        break;
    }
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double n = cells[c].n_episodes;
    cells[c].failure_rate = collided[c] / n;
    cells[c].timeout_rate = timed_out[c] / n;
    cells[c].mean_ticks_to_goal =
        reached[c] > 0 ? static_cast<double>(tick_sum[c]) / reached[c]
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return cells;
}

std::string batch_to_csv(const std::vector<BatchCell>& cells) {
  std::ostringstream out;
  out << "variant,n_escorts,n_episodes,failure_rate,timeout_rate,mean_ticks_to_goal\n";
  char buf[64];
  for (const auto& c : cells) {
    out << c.variant << "," << c.n_escorts << "," << c.n_episodes << ",";
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g", c.failure_rate,
                  c.timeout_rate, c.mean_ticks_to_goal);
    out << buf << "\n";
  }
  return out.str();
}

}  // namespace escort
