#include "gemn/harness/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include "gemn/eddc/power_state_machine.hpp"
#include "gemn/ids/anomaly.hpp"
#include "gemn/ids/behavior.hpp"
#include "gemn/ids/features.hpp"
#include "gemn/ids/fusion.hpp"
#include "gemn/ids/mcc.hpp"
#include "gemn/ids/signature.hpp"
#include "gemn/net/forwarding.hpp"
#include "gemn/net/olsr.hpp"
#include "gemn/sim/engine.hpp"
#include "gemn/sim/random.hpp"
#include "gemn/traffic/attacks.hpp"
#include "gemn/traffic/generators.hpp"

namespace gemn::harness {

using net::AppClass;
using net::NodeId;
using sim::EventKind;
using sim::SimEvent;
using sim::SimTime;

std::vector<ids::Rule> load_rules(const ScenarioConfig& cfg) {
  std::string text;
  if (!cfg.echids.rules_path.empty()) {
    std::ifstream in(cfg.echids.rules_path, std::ios::binary);
    if (!in) throw ConfigError("echids.rules_path", "cannot read rule file " + cfg.echids.rules_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    if (!text.empty() && text.back() != '\n') text += '\n';
  }
  text += cfg.echids.rules;
  return ids::parse_rules(text);
}

namespace {

enum class Drop { kBufferFull, kDepleted, kNoRoute, kTtl, kBlackhole, kBlocked, kOversize };

const char* drop_name(Drop d) {
  switch (d) {
    case Drop::kBufferFull: return "buffer_full";
    case Drop::kDepleted: return "depleted";
    case Drop::kNoRoute: return "no_route";
    case Drop::kTtl: return "ttl";
    case Drop::kBlackhole: return "blackhole";
    case Drop::kBlocked: return "blocked";
    case Drop::kOversize: return "oversize";
  }
  return "unknown";
}

struct Packet {
  net::PacketRecord rec;
  std::uint32_t units = 1;
  double created_sum_s = 0.0;  // sum of creation times over units
  NodeId next_hop = sim::kNoNode;
  NodeId handed_by = sim::kNoNode;
  std::int64_t handed_window = 0;
  std::int64_t file = -1;
  bool deliver_here = false;
  bool live = false;
};

struct ImageFile {
  SimTime requested;
  std::uint32_t remaining = 0;
  bool failed = false;
};

struct Wsr {
  NodeId id = 0;
  std::unique_ptr<eddc::PowerStateMachine> psm;
  eddc::NicBuffer nic;
  energy::DutyPlan plan;
  int panels = 0;
  bool managed = true;
  std::vector<traffic::SensorSource> sensors;
  std::vector<traffic::AppSource> apps;
  SimTime last_service_end;
  bool in_service = false;
  SimTime service_tx;

  std::vector<ids::IngressRecord> records;
  ids::ForwardingMonitor fwd;
  ids::EnergyExhaustMonitor exhaust;
  ids::SeasonalBaseline baseline;
  std::unique_ptr<ids::ReportBuilder> report;
  std::map<NodeId, SimTime> local_blocks;  // subject -> expiry
  std::vector<ids::Rule> rules;
  std::unique_ptr<sim::RandomStream> observe_rng;

  double tx_bits = 0.0;
  double rx_bits = 0.0;
  std::optional<double> depleted_at;
  std::uint64_t depletions = 0;
};

struct MccNode {
  NodeId id = 0;
  std::deque<std::uint32_t> queue;
  bool busy = false;
  double tx_bits = 0.0;
  double rx_bits = 0.0;
  struct Client {
    NodeId wsr;
    traffic::AppSource source;
  };
  std::vector<Client> images;
};

struct Attack {
  traffic::AttackProfile profile;
  NodeId attacker = sim::kNoNode;
  std::unique_ptr<traffic::DosInjector> injector;
};

class Simulation {
 public:
  Simulation(const ScenarioConfig& cfg, const std::vector<ids::Rule>& rules);
  RunResult run();

 private:
  // setup
  void build_topology();
  void build_nodes(const std::vector<ids::Rule>& rules);
  void schedule_initial();

  // event handlers
  void handle(const SimEvent& ev);
  void on_slot(SimTime now);
  void on_service_done(NodeId n, std::uint32_t pid, SimTime now);
  void on_mcc_done(std::uint32_t pid, SimTime now);
  void on_app(NodeId n, std::size_t idx, SimTime now);
  void on_image(std::size_t idx, SimTime now);
  void on_attack(std::size_t idx, SimTime now);
  void on_window(SimTime now);
  void on_report(SimTime now);

  // packet flow
  std::uint32_t new_packet(AppClass app, NodeId src, NodeId dst, std::uint64_t bits, SimTime created,
                           std::uint32_t units, double created_sum);
  void arrive(NodeId n, std::uint32_t pid, SimTime now, NodeId from);
  void try_serve(NodeId n, SimTime now);
  void mcc_try_serve(SimTime now);
  void deliver(std::uint32_t pid, SimTime now);
  void drop(std::uint32_t pid, Drop cause);
  void release(std::uint32_t pid);

  // helpers
  [[nodiscard]] bool is_wsr(NodeId n) const { return n < wsrs_.size(); }
  [[nodiscard]] bool is_mcc(NodeId n) const { return mcc_ && n == mcc_->id; }
  Wsr& wsr(NodeId n) { return wsrs_[n]; }
  void advance(Wsr& w, SimTime now);
  void check_depletion(Wsr& w, SimTime now);
  void replan(Wsr& w, std::int64_t day);
  [[nodiscard]] std::int64_t window_index(SimTime t) const { return t.ns() / window_.ns(); }
  [[nodiscard]] bool trace_blocked(const Packet& p, const std::set<NodeId>& blocked) const;
  [[nodiscard]] std::set<NodeId> effective_blocks(const Wsr& w) const;
  [[nodiscard]] std::set<NodeId> network_blocks(SimTime now) const;
  void refresh_blocks(SimTime now);
  void charge(Wsr& w, eddc::ChargeCategory cat, double current_mA, double bits);
  void touch(NodeId n);
  void check_energy();
  void record_ingress(Wsr& w, const Packet& p, SimTime at, SimTime span, NodeId from);
  [[nodiscard]] bool measuring(SimTime t) const { return t >= measure_from_; }
  [[nodiscard]] SimTime wall(SimTime t) const {
    return t + SimTime::from_seconds(cfg_.start_hour * 3600.0);
  }
  void finish(RunResult& out);
  std::string dump_topology();

  ScenarioConfig cfg_;
  sim::Engine engine_;
  sim::RandomStream root_;
  net::Topology topo_;
  std::unique_ptr<net::OlsrDomain> domain_;
  std::vector<Wsr> wsrs_;
  std::optional<MccNode> mcc_;
  std::vector<Attack> attacks_;
  std::vector<traffic::BlackHole> blackholes_;
  std::unique_ptr<ids::MccAggregator> aggregator_;
  std::map<NodeId, SimTime> network_blocks_;  // subject -> expiry
  std::vector<ids::Rule> base_rules_;

  std::vector<Packet> pool_;
  std::vector<std::uint32_t> free_;
  std::vector<ImageFile> files_;

  SimTime slot_;
  SimTime window_;
  SimTime report_period_;
  SimTime horizon_;
  SimTime measure_from_;
  SimTime trace_interval_;
  SimTime wake_latency_;
  std::int64_t current_day_ = -1;
  bool baseline_finalized_ = false;

  std::vector<NodeId> touched_;
  std::vector<char> touched_flag_;

  RunResult result_;
  std::map<std::string, metrics::ClassAccounting> accounting_;
  std::map<std::string, std::vector<metrics::WeightedSample>> delays_;
  std::vector<metrics::WeightedSample> access_delays_;
  double max_residual_ = 0.0;
};

Simulation::Simulation(const ScenarioConfig& cfg, const std::vector<ids::Rule>& rules)
    : cfg_{cfg}, root_{cfg.seed, "gemn"} {
  slot_ = SimTime::from_seconds(cfg_.node.slot_s);
  window_ = SimTime::from_seconds(cfg_.echids.window_s);
  report_period_ = SimTime::from_seconds(cfg_.echids.report_period_s);
  horizon_ = SimTime::from_seconds(cfg_.total_horizon_s());
  measure_from_ = SimTime::from_seconds(cfg_.echids.baseline_training_s);
  trace_interval_ = SimTime::from_seconds(cfg_.output.trace_interval_s);
  wake_latency_ = SimTime::from_seconds(cfg_.node.wake_latency_s);
  if (window_.ns() % slot_.ns() != 0 || report_period_.ns() % window_.ns() != 0) {
    throw ConfigError("echids.window_s", "detection window must be a multiple of the slot and divide the report period");
  }
  build_topology();
  build_nodes(rules);
}

void Simulation::build_topology() {
  auto placement_rng = root_.split("topology");
  net::TopologySpec spec = cfg_.topology;
  spec.attackers.clear();
  const net::Topology base = net::build_topology(spec, cfg_.radio, placement_rng);

  std::vector<net::NodeDescriptor> nodes = base.nodes();
  for (const auto& a : cfg_.attacks) {
    if (a.kind != traffic::AttackKind::kEnergyExhaustDos) continue;
    net::Position pos;
    if (a.position) {
      pos = *a.position;
    } else {
      // Park the attacker radio 50 m from its target, inside the span.
      pos = base.node(a.target).pos;
      pos.x += pos.x + 50.0 <= cfg_.topology.span_m ? 50.0 : -50.0;
    }
    nodes.push_back({static_cast<NodeId>(nodes.size()), net::NodeKind::kAttacker, pos});
  }
  topo_ = net::Topology(std::move(nodes), cfg_.radio);
}

void Simulation::build_nodes(const std::vector<ids::Rule>& rules) {
  base_rules_ = rules;
  const auto wsr_count = static_cast<std::size_t>(std::count_if(
      topo_.nodes().begin(), topo_.nodes().end(), [](const auto& n) { return n.kind == net::NodeKind::kWsr; }));
  touched_flag_.assign(topo_.size(), 0);
  pool_.reserve(4096);

  if (auto m = topo_.mcc()) {
    mcc_.emplace();
    mcc_->id = *m;
  }

  wsrs_.resize(wsr_count);
  auto sensors_rng = root_.split("signaling");
  auto text_rng = root_.split("text");
  auto video_rng = root_.split("video");
  auto observe_rng = root_.split("observe");
  for (std::size_t i = 0; i < wsr_count; ++i) {
    Wsr& w = wsrs_[i];
    w.id = static_cast<NodeId>(i);
    double re = cfg_.wsr_defaults.initial_re;
    w.panels = cfg_.wsr_defaults.panels;
    w.managed = cfg_.node.managed;
    for (const auto& o : cfg_.wsr_overrides) {
      if (o.id != w.id) continue;
      if (o.initial_re) re = *o.initial_re;
      if (o.panels) w.panels = *o.panels;
      if (o.managed) w.managed = *o.managed;
    }
    eddc::NodeEnergyConfig ec;
    ec.currents = cfg_.currents.profile;
    ec.capacity_mAh = cfg_.battery.capacity_mAh;
    ec.efficiency = cfg_.battery.discharge_efficiency;
    ec.restart_fraction = cfg_.battery.restart_fraction;
    ec.wake_latency = wake_latency_;
    ec.managed = w.managed;
    ec.harvest.panels = w.panels;
    ec.harvest.panel = cfg_.panel.model;
    ec.harvest.weather = cfg_.weather;
    ec.harvest.start_hour = cfg_.start_hour;
    w.psm = std::make_unique<eddc::PowerStateMachine>(ec, re);
    w.nic = eddc::NicBuffer(cfg_.node.buffer_bytes);
    w.report = std::make_unique<ids::ReportBuilder>(w.id);
    w.rules = rules;
    w.observe_rng = std::make_unique<sim::RandomStream>(observe_rng.split(w.id));

    if (cfg_.traffic.signaling.enabled) {
      auto r = sensors_rng.split(w.id);
      for (int k = 0; k < cfg_.traffic.signaling.sensors_per_wsr; ++k) {
        w.sensors.emplace_back(cfg_.traffic.signaling, r.split(static_cast<std::uint64_t>(k)));
      }
    }
    if (mcc_) {
      if (cfg_.traffic.text.enabled) {
        auto r = text_rng.split(w.id);
        for (int k = 0; k < cfg_.traffic.text.clients_per_wsr; ++k) {
          w.apps.emplace_back(traffic::text_profile(cfg_.traffic.text), r.split(static_cast<std::uint64_t>(k)));
        }
      }
      const int nth = cfg_.traffic.video.every_nth_wsr;
      if (cfg_.traffic.video.enabled && nth > 0 && w.id % static_cast<NodeId>(nth) == 0) {
        auto r = video_rng.split(w.id);
        auto rate_rng = r.split("rate");
        w.apps.emplace_back(traffic::video_profile(cfg_.traffic.video, rate_rng), r.split("frames"));
      }
    }
  }

  if (mcc_ && cfg_.traffic.image.enabled) {
    auto image_rng = root_.split("image");
    for (auto& w : wsrs_) {
      auto r = image_rng.split(w.id);
      for (int k = 0; k < cfg_.traffic.image.clients_per_wsr; ++k) {
        mcc_->images.push_back({w.id, traffic::AppSource(traffic::image_profile(cfg_.traffic.image),
                                                         r.split(static_cast<std::uint64_t>(k)))});
      }
    }
  }

  current_day_ = static_cast<std::int64_t>(std::floor(cfg_.start_hour / 24.0));
  for (auto& w : wsrs_) replan(w, current_day_);

  NodeId next_attacker = static_cast<NodeId>(wsr_count + (mcc_ ? 1 : 0));
  for (const auto& a : cfg_.attacks) {
    if (a.kind == traffic::AttackKind::kBlackHole) {
      blackholes_.push_back({a.target, a.start, a.stop});
      continue;
    }
    Attack at;
    at.profile = a;
    at.attacker = next_attacker++;
    at.injector = std::make_unique<traffic::DosInjector>(a, wsrs_.at(a.target).plan.asr_mbps);
    attacks_.push_back(std::move(at));
  }

  domain_ = std::make_unique<net::OlsrDomain>(topo_, cfg_.olsr.timers());
  // Converge routing on a scratch timeline before traffic starts; the
  // resulting tuples stay valid until refreshed by the live exchange.
  domain_->run_until(SimTime::from_whole_seconds(20));
  net::OlsrDomain::Hooks hooks;
  hooks.alive = [this](NodeId n) { return !is_wsr(n) || wsrs_[n].psm->state() != eddc::PowerState::kDepleted; };
  hooks.on_tx = [this](NodeId n, double bits) {
    if (is_wsr(n)) charge(wsrs_[n], eddc::ChargeCategory::kTx, cfg_.currents.profile.i_tx_mA, bits);
  };
  hooks.on_rx = [this](NodeId n, double bits) {
    if (is_wsr(n)) charge(wsrs_[n], eddc::ChargeCategory::kRx, cfg_.currents.profile.i_rx_mA, bits);
  };
  domain_->set_hooks(std::move(hooks));

  aggregator_ = std::make_unique<ids::MccAggregator>(cfg_.echids.mcc, topo_.mcc());
  result_.battery.reserve(wsrs_.size());
  for (const auto& w : wsrs_) {
    result_.battery.emplace_back("battery_wsr" + std::to_string(w.id), "mAh", cfg_.label, "time_s", "stored_mAh");
  }
}

void Simulation::replan(Wsr& w, std::int64_t day) {
  energy::BatteryModel b;
  b.capacity_mAh = cfg_.battery.capacity_mAh;
  b.residual_fraction = std::clamp(w.psm->residual_fraction(), 0.0, 1.0);
  b.discharge_efficiency = cfg_.battery.discharge_efficiency;
  const auto weather = w.psm->config().harvest.weather_on_day(day);
  w.plan = energy::plan_day(b, w.panels, weather, cfg_.panel.model, cfg_.planner());
  w.psm->set_plan(w.plan);
}

void Simulation::schedule_initial() {
  engine_.schedule(SimTime{}, EventKind::kSlotBoundary);
  for (NodeId n : topo_.routing_nodes()) {
    engine_.schedule(net::OlsrDomain::hello_phase(n), EventKind::kHello, n);
    engine_.schedule(net::OlsrDomain::tc_phase(n), EventKind::kTopologyControl, n);
  }
  for (auto& w : wsrs_) {
    for (std::size_t i = 0; i < w.apps.size(); ++i) {
      engine_.schedule(w.apps[i].peek(), EventKind::kTrafficSource, w.id, 0, i);
    }
  }
  if (mcc_) {
    for (std::size_t i = 0; i < mcc_->images.size(); ++i) {
      engine_.schedule(mcc_->images[i].source.peek(), EventKind::kTrafficSource, mcc_->id, 0, i);
    }
  }
  for (std::size_t i = 0; i < attacks_.size(); ++i) {
    if (attacks_[i].injector->active()) {
      engine_.schedule(attacks_[i].injector->peek(), EventKind::kAttackPacket, attacks_[i].profile.target, 0, i);
    }
  }
}

RunResult Simulation::run() {
  schedule_initial();
  const auto summary = engine_.run_until(horizon_, [this](const SimEvent& ev) {
    handle(ev);
    check_energy();
  });
  result_.summary.events = summary.events_processed;
  finish(result_);
  return std::move(result_);
}

void Simulation::touch(NodeId n) {
  if (!is_wsr(n) || touched_flag_[n]) return;
  touched_flag_[n] = 1;
  touched_.push_back(n);
}

void Simulation::check_energy() {
  for (NodeId n : touched_) {
    max_residual_ = std::max(max_residual_, wsrs_[n].psm->ledger().identity_residual());
    touched_flag_[n] = 0;
  }
  touched_.clear();
}

void Simulation::advance(Wsr& w, SimTime now) {
  touch(w.id);
  w.psm->advance(now);
  check_depletion(w, now);
}

void Simulation::check_depletion(Wsr& w, SimTime now) {
  if (!w.psm->take_depletion_flag()) return;
  ++w.depletions;
  if (!w.depleted_at) w.depleted_at = now.seconds();
  for (const auto& rec : w.nic.clear()) drop(rec.packet, Drop::kDepleted);
}

void Simulation::charge(Wsr& w, eddc::ChargeCategory cat, double current_mA, double bits) {
  const SimTime now = engine_.now();
  advance(w, now);
  w.psm->charge(cat, eddc::charge_mAh(current_mA, sim::duration_for_bits(bits, cfg_.radio.data_rate_mbps)));
  check_depletion(w, now);
}

void Simulation::handle(const SimEvent& ev) {
  const SimTime now = ev.fire_at;
  switch (ev.kind) {
    case EventKind::kSlotBoundary: on_slot(now); break;
    case EventKind::kWake: {
      Wsr& w = wsr(ev.target);
      touch(w.id);
      w.psm->wake(now);
      check_depletion(w, now);
      try_serve(w.id, now);
      break;
    }
    case EventKind::kServiceDone:
      if (is_mcc(ev.target)) {
        on_mcc_done(static_cast<std::uint32_t>(ev.payload), now);
      } else {
        on_service_done(ev.target, static_cast<std::uint32_t>(ev.payload), now);
      }
      break;
    case EventKind::kTrafficSource:
      if (is_mcc(ev.target)) {
        on_image(ev.aux, now);
      } else {
        on_app(ev.target, ev.aux, now);
      }
      break;
    case EventKind::kAttackPacket: on_attack(ev.aux, now); break;
    case EventKind::kHello:
      domain_->emit_hello(ev.target, now);
      engine_.schedule(now + domain_->timers().hello_interval, EventKind::kHello, ev.target);
      break;
    case EventKind::kTopologyControl:
      domain_->emit_tc(ev.target, now);
      engine_.schedule(now + domain_->timers().tc_interval, EventKind::kTopologyControl, ev.target);
      break;
    default: break;
  }
}

void Simulation::on_slot(SimTime now) {
  const std::int64_t day =
      static_cast<std::int64_t>(std::floor((now.seconds() + cfg_.start_hour * 3600.0) / 86400.0));
  const bool new_day = day != current_day_;
  current_day_ = day;

  for (auto& w : wsrs_) {
    advance(w, now);
    if (w.psm->state() == eddc::PowerState::kDepleted) w.psm->try_restart(now);
    if (new_day) replan(w, day);
    const auto win = w.psm->begin_slot(now);
    check_depletion(w, now);
    if (win.sleep_until > now && w.psm->state() != eddc::PowerState::kDepleted) {
      engine_.schedule(win.sleep_until, EventKind::kWake, w.id);
    }

    // Readings created during the slot that just ended reach the router as
    // one bundle.
    if (!w.sensors.empty() && now > SimTime{}) {
      traffic::SensorBatch batch;
      for (auto& s : w.sensors) s.drain(now, batch);
      if (batch.readings > 0) {
        const NodeId dst = mcc_ ? mcc_->id : w.id;
        const SimTime first = batch.first_created;
        const std::uint32_t pid =
            new_packet(AppClass::kSignaling, w.id, dst, batch.bits, first, batch.readings, batch.created_sum_s);
        if (measuring(first)) {
          const double mean_bits = static_cast<double>(batch.bits) / batch.readings;
          access_delays_.push_back(
              {sim::duration_for_bits(mean_bits, cfg_.radio.data_rate_mbps).seconds(), batch.readings});
        }
        arrive(w.id, pid, now, sim::kNoNode);
      }
    }
    try_serve(w.id, now);
  }

  if (now.ns() % trace_interval_.ns() == 0) {
    for (auto& w : wsrs_) result_.battery[w.id].add(now.seconds(), w.psm->stored_mAh());
  }
  if (now > SimTime{} && now.ns() % window_.ns() == 0) on_window(now);
  if (now > SimTime{} && now.ns() % report_period_.ns() == 0) on_report(now);

  const SimTime next = now + slot_;
  if (next <= horizon_) engine_.schedule(next, EventKind::kSlotBoundary);
}

std::uint32_t Simulation::new_packet(AppClass app, NodeId src, NodeId dst, std::uint64_t bits, SimTime created,
                                     std::uint32_t units, double created_sum) {
  std::uint32_t pid;
  if (!free_.empty()) {
    pid = free_.back();
    free_.pop_back();
  } else {
    pid = static_cast<std::uint32_t>(pool_.size());
    pool_.emplace_back();
  }
  Packet& p = pool_[pid];
  p.rec.id = pid;
  p.rec.app = app;
  p.rec.src = src;
  p.rec.dst = dst;
  p.rec.size_bits = static_cast<std::uint32_t>(std::min<std::uint64_t>(bits, UINT32_MAX));
  p.rec.created_at = created;
  p.rec.delivered_at.reset();
  p.rec.hops.clear();
  p.rec.hops.push_back(src);
  p.rec.tag.clear();
  p.units = units;
  p.created_sum_s = created_sum;
  p.next_hop = sim::kNoNode;
  p.handed_by = sim::kNoNode;
  p.file = -1;
  p.deliver_here = false;
  p.live = true;
  accounting_[std::string(net::to_string(app))].generated += units;
  return pid;
}

void Simulation::release(std::uint32_t pid) {
  pool_[pid].live = false;
  free_.push_back(pid);
}

void Simulation::drop(std::uint32_t pid, Drop cause) {
  Packet& p = pool_[pid];
  accounting_[std::string(net::to_string(p.rec.app))].dropped += p.units;
  result_.summary.drops_by_cause[drop_name(cause)] += p.units;
  if (p.file >= 0) files_[static_cast<std::size_t>(p.file)].failed = true;
  release(pid);
}

void Simulation::deliver(std::uint32_t pid, SimTime now) {
  Packet& p = pool_[pid];
  p.rec.delivered_at = now;
  const std::string app(net::to_string(p.rec.app));
  accounting_[app].delivered += p.units;
  if (measuring(p.rec.created_at)) {
    const double mean_created = p.created_sum_s / p.units;
    delays_[app].push_back({std::max(0.0, now.seconds() - mean_created), p.units});
  }
  for (NodeId h : p.rec.hops) {
    auto it = result_.network_block_at_s.find(h);
    if (it != result_.network_block_at_s.end() && now.seconds() >= it->second) {
      ++result_.summary.delivered_through_blocked;
      break;
    }
  }
  if (p.file >= 0) {
    auto& f = files_[static_cast<std::size_t>(p.file)];
    if (--f.remaining == 0 && !f.failed && measuring(f.requested)) {
      delays_["image_file"].push_back({(now - f.requested).seconds(), 1});
    }
  }
  release(pid);
}

bool Simulation::trace_blocked(const Packet& p, const std::set<NodeId>& blocked) const {
  if (blocked.empty()) return false;
  return std::any_of(p.rec.hops.begin(), p.rec.hops.end(), [&](NodeId h) { return blocked.contains(h); });
}

std::set<NodeId> Simulation::network_blocks(SimTime now) const {
  std::set<NodeId> out;
  for (const auto& [id, exp] : network_blocks_) {
    if (exp > now) out.insert(id);
  }
  return out;
}

std::set<NodeId> Simulation::effective_blocks(const Wsr& w) const {
  std::set<NodeId> out = network_blocks(engine_.now());
  for (const auto& [id, exp] : w.local_blocks) {
    if (exp > engine_.now()) out.insert(id);
  }
  return out;
}

void Simulation::refresh_blocks(SimTime now) {
  const auto network = network_blocks(now);
  for (auto& w : wsrs_) {
    std::erase_if(w.local_blocks, [&](const auto& kv) { return kv.second <= now; });
    domain_->agent(w.id).set_blocked(effective_blocks(w));
  }
  if (mcc_) domain_->agent(mcc_->id).set_blocked(network);
}

void Simulation::record_ingress(Wsr& w, const Packet& p, SimTime at, SimTime span, NodeId from) {
  if (!cfg_.echids.enabled) return;
  ids::IngressRecord r;
  r.at = at;
  r.span = span;
  r.src = p.rec.src;
  r.dst = p.rec.dst;
  r.prev = from;
  r.app = p.rec.app;
  r.packets = p.units;
  r.bits = p.rec.size_bits;
  r.tag = p.rec.tag;
  w.records.push_back(std::move(r));
}

void Simulation::arrive(NodeId n, std::uint32_t pid, SimTime now, NodeId from) {
  Packet& p = pool_[pid];
  if (from != sim::kNoNode) p.rec.hops.push_back(n);

  if (is_mcc(n)) {
    mcc_->rx_bits += p.rec.size_bits;
    if (trace_blocked(p, network_blocks(now))) {
      drop(pid, Drop::kBlocked);
    } else if (p.rec.dst == n) {
      deliver(pid, now);
    } else {
      mcc_->queue.push_back(pid);
      mcc_try_serve(now);
    }
    return;
  }

  Wsr& w = wsr(n);
  advance(w, now);
  if (w.psm->state() == eddc::PowerState::kDepleted) {
    drop(pid, Drop::kDepleted);
    return;
  }
  w.rx_bits += p.rec.size_bits;
  charge(w, eddc::ChargeCategory::kRx, cfg_.currents.profile.i_rx_mA, p.rec.size_bits);
  if (w.psm->state() == eddc::PowerState::kDepleted) {
    drop(pid, Drop::kDepleted);
    return;
  }
  if (p.rec.app == AppClass::kSignaling && from == sim::kNoNode) {
    record_ingress(w, p, now - slot_, slot_, from);
  } else if (p.rec.app == AppClass::kAttack) {
    record_ingress(w, p, now, SimTime::from_seconds(attacks_.empty() ? 0.0 : attacks_.front().profile.chunk_s), from);
  } else {
    record_ingress(w, p, now, SimTime{}, from);
  }

  const auto action = w.psm->on_packet_arrival(now, w.nic, {pid, p.rec.size_bytes()});
  if (action == eddc::ArrivalAction::kDropped) {
    drop(pid, Drop::kBufferFull);
    return;
  }
  if (action == eddc::ArrivalAction::kWake) try_serve(n, now);
}

void Simulation::try_serve(NodeId n, SimTime now) {
  Wsr& w = wsr(n);
  if (w.in_service) return;
  while (!w.nic.empty()) {
    advance(w, now);
    if (w.psm->state() == eddc::PowerState::kDepleted || !w.psm->can_serve(now)) return;
    const std::uint32_t pid = w.nic.front()->packet;
    Packet& p = pool_[pid];

    if (trace_blocked(p, effective_blocks(w))) {
      w.nic.pop();
      drop(pid, Drop::kBlocked);
      continue;
    }
    const bool local = p.rec.dst == n;
    if (!local && std::any_of(blackholes_.begin(), blackholes_.end(),
                              [&](const traffic::BlackHole& b) { return b.drops(p.rec, n, now); })) {
      w.nic.pop();
      drop(pid, Drop::kBlackhole);
      continue;
    }
    NodeId next = sim::kNoNode;
    if (!local) {
      const auto routes = domain_->agent(n).routes(now);
      const auto d = net::forward(p.rec, n, *routes, cfg_.radio);
      if (d.kind == net::ForwardKind::kDropNoRoute || d.kind == net::ForwardKind::kDropTtl) {
        w.nic.pop();
        drop(pid, d.kind == net::ForwardKind::kDropTtl ? Drop::kTtl : Drop::kNoRoute);
        continue;
      }
      next = d.next_hop;
    }

    // A bundle of sensor readings is one network packet; a flood chunk is
    // many.
    const double packets = p.rec.app == AppClass::kSignaling ? 1.0 : static_cast<double>(p.units);
    SimTime proc = std::max(sim::duration_for_bits(p.rec.size_bits, cfg_.node.processing_rate_mbps),
                            SimTime::from_seconds(packets / cfg_.node.packets_per_sec));
    if (w.managed && w.last_service_end < now) proc += wake_latency_;
    const bool consumed_here = local && (p.rec.app == AppClass::kAttack || p.rec.src == n);
    const SimTime tx = consumed_here ? SimTime{} : net::link_latency(p.rec.size_bits, cfg_.radio);
    if (w.managed && (proc + tx).seconds() > w.plan.active_s + 1e-12) {
      w.nic.pop();
      drop(pid, Drop::kOversize);
      continue;
    }
    const auto end = w.psm->start_service(now, proc, tx);
    if (!end) return;  // resumes in the next active window
    w.nic.pop();
    p.next_hop = next;
    p.deliver_here = local;
    w.in_service = true;
    w.service_tx = tx;
    engine_.schedule(*end, EventKind::kServiceDone, n, pid);
    return;
  }
}

void Simulation::on_service_done(NodeId n, std::uint32_t pid, SimTime now) {
  Wsr& w = wsr(n);
  w.in_service = false;
  touch(n);
  const bool was_alive = w.psm->state() != eddc::PowerState::kDepleted;
  w.psm->finish_service(now);
  check_depletion(w, now);
  Packet& p = pool_[pid];
  if (!was_alive || w.psm->state() == eddc::PowerState::kDepleted) {
    drop(pid, Drop::kDepleted);
    return;
  }
  w.last_service_end = now;
  if (w.service_tx > SimTime{}) w.tx_bits += p.rec.size_bits;

  if (p.deliver_here) {
    deliver(pid, now);
  } else {
    if (p.handed_by != sim::kNoNode) wsr(p.handed_by).fwd.forwarded(n, p.handed_window, p.units);
    p.handed_by = sim::kNoNode;
    const NodeId next = p.next_hop;
    if (is_wsr(next) && next != p.rec.dst &&
        w.observe_rng->bernoulli(cfg_.echids.behavior.observation_probability)) {
      p.handed_by = n;
      p.handed_window = window_index(now);
      w.fwd.handed(next, p.handed_window, p.units);
    }
    arrive(next, pid, now, n);
  }
  try_serve(n, now);
}

void Simulation::mcc_try_serve(SimTime now) {
  MccNode& m = *mcc_;
  while (!m.busy && !m.queue.empty()) {
    const std::uint32_t pid = m.queue.front();
    m.queue.pop_front();
    Packet& p = pool_[pid];
    if (trace_blocked(p, network_blocks(now))) {
      drop(pid, Drop::kBlocked);
      continue;
    }
    const auto routes = domain_->agent(m.id).routes(now);
    const auto d = net::forward(p.rec, m.id, *routes, cfg_.radio);
    if (d.kind == net::ForwardKind::kDeliver) {
      deliver(pid, now);
      continue;
    }
    if (d.kind != net::ForwardKind::kTransmit) {
      drop(pid, d.kind == net::ForwardKind::kDropTtl ? Drop::kTtl : Drop::kNoRoute);
      continue;
    }
    p.next_hop = d.next_hop;
    m.busy = true;
    engine_.schedule(now + d.latency, EventKind::kServiceDone, m.id, pid);
  }
}

void Simulation::on_mcc_done(std::uint32_t pid, SimTime now) {
  MccNode& m = *mcc_;
  m.busy = false;
  Packet& p = pool_[pid];
  m.tx_bits += p.rec.size_bits;
  arrive(p.next_hop, pid, now, m.id);
  mcc_try_serve(now);
}

void Simulation::on_app(NodeId n, std::size_t idx, SimTime now) {
  Wsr& w = wsr(n);
  auto& src = w.apps[idx];
  const auto e = src.next();
  const std::uint32_t pid =
      new_packet(src.profile().app, n, mcc_->id, e.size_bits, e.at, 1, e.at.seconds());
  arrive(n, pid, now, sim::kNoNode);
  if (src.peek() <= horizon_) engine_.schedule(src.peek(), EventKind::kTrafficSource, n, 0, idx);
}

void Simulation::on_image(std::size_t idx, SimTime now) {
  auto& client = mcc_->images[idx];
  const auto e = client.source.next();
  const auto segments = traffic::fragment(e.size_bits, cfg_.traffic.image.segment_bytes);
  const auto file = static_cast<std::int64_t>(files_.size());
  files_.push_back({now, static_cast<std::uint32_t>(segments.size()), false});
  for (std::uint32_t bits : segments) {
    const std::uint32_t pid = new_packet(AppClass::kImage, mcc_->id, client.wsr, bits, now, 1, now.seconds());
    pool_[pid].file = file;
    mcc_->queue.push_back(pid);
  }
  mcc_try_serve(now);
  if (client.source.peek() <= horizon_) {
    engine_.schedule(client.source.peek(), EventKind::kTrafficSource, mcc_->id, 0, idx);
  }
}

void Simulation::on_attack(std::size_t idx, SimTime now) {
  Attack& a = attacks_[idx];
  const auto chunk = a.injector->next();
  if (chunk && chunk->packets > 0) {
    const double chunk_s = a.profile.chunk_s;
    const double mid = chunk->at.seconds() + chunk_s / 2.0;
    const std::uint32_t pid = new_packet(AppClass::kAttack, a.attacker, a.profile.target, chunk->bits, chunk->at,
                                         chunk->packets, mid * chunk->packets);
    pool_[pid].rec.tag = a.profile.tag;
    arrive(a.profile.target, pid, now, a.attacker);
  }
  if (a.injector->active() && a.injector->peek() <= horizon_) {
    engine_.schedule(a.injector->peek(), EventKind::kAttackPacket, a.profile.target, 0, idx);
  }
}

void Simulation::on_window(SimTime now) {
  if (!cfg_.echids.enabled) return;
  const SimTime start = now - window_;
  const std::int64_t widx = window_index(now);  // index of the window starting now
  const bool training = now <= measure_from_;
  if (!training && !baseline_finalized_) {
    for (auto& w : wsrs_) w.baseline.finalize();
    baseline_finalized_ = true;
  }
  const ids::MatchContext base_ctx{sim::kNoNode, topo_.mcc(), start, now};
  const SimTime gap = SimTime::from_seconds(cfg_.echids.gap_threshold_s);
  bool blocks_changed = false;

  for (auto& w : wsrs_) {
    std::vector<ids::Alert> alerts;
    const auto features = ids::extract_features(w.records, start, now, gap);
    const bool alive = w.psm->state() != eddc::PowerState::kDepleted;
    const double asr_bps = w.plan.asr_mbps * 1e6;

    if (training) {
      w.baseline.observe(wall(start), features.avg_rate_bps);
    } else if (alive) {
      if (auto a = ids::anomaly_check(features, w.baseline, cfg_.echids.anomaly, w.id, asr_bps)) {
        // Evaluated on wall-clock hour of the window.
        alerts.push_back(*a);
      }
    }

    if (alive) {
      ids::MatchContext ctx = base_ctx;
      ctx.reporter = w.id;
      for (auto& a : ids::signature_match(w.records, w.rules, ctx)) alerts.push_back(std::move(a));

      for (NodeId nb : w.fwd.neighbors()) {
        if (auto a = ids::blackhole_check(w.id, nb, w.fwd.stats(nb, widx - 2), cfg_.echids.behavior, now)) {
          alerts.push_back(*a);
        }
      }
      const NodeId top = features.top_source().first;
      for (std::size_t b = 0; b < features.bin_rates_bps.size(); ++b) {
        const SimTime bin_start = start + SimTime::from_whole_seconds(static_cast<std::int64_t>(b));
        if (auto a = w.exhaust.feed(bin_start, features.bin_rates_bps[b], asr_bps, w.id, top, cfg_.echids.behavior)) {
          alerts.push_back(*a);
        }
      }
    }
    w.fwd.prune(widx - 2);

    for (const auto& a : alerts) {
      const bool act = ids::actionable(a, cfg_.echids.fusion);
      w.report->add(a, act);
      result_.alerts.push_back(a);
    }
    for (NodeId subject : ids::fuse(alerts, w.id, topo_.mcc(), cfg_.echids.fusion)) {
      if (!w.local_blocks.contains(subject)) {
        w.report->add_block(subject);
        blocks_changed = true;
      }
      w.local_blocks[subject] = now + cfg_.echids.mcc.block_ttl;
    }
    // Keep records that extend past the window edge.
    std::erase_if(w.records, [&](const ids::IngressRecord& r) { return r.at + r.span <= now; });
  }
  if (blocks_changed || !network_blocks_.empty() ||
      std::any_of(wsrs_.begin(), wsrs_.end(), [](const Wsr& w) { return !w.local_blocks.empty(); })) {
    refresh_blocks(now);
  }
}

void Simulation::on_report(SimTime now) {
  if (!cfg_.echids.enabled) return;
  const std::int64_t period = now.ns() / report_period_.ns() - 1;
  std::vector<ids::SecurityReport> reports;
  const bool inactive = !baseline_finalized_ || wsrs_.empty() || !wsrs_.front().baseline.trained();
  for (auto& w : wsrs_) {
    auto r = w.report->take(period, inactive);
    if (w.psm->state() == eddc::PowerState::kDepleted || !mcc_) continue;
    // Reports travel on the control plane; the sender pays the airtime.
    const double bits = 8.0 * (16.0 + 8.0 * static_cast<double>(r.counts.size() + r.top_suspects.size()));
    charge(w, eddc::ChargeCategory::kTx, cfg_.currents.profile.i_tx_mA, bits);
    reports.push_back(r);
    result_.reports.push_back(std::move(r));
  }
  if (!mcc_) return;
  auto summary = aggregator_->aggregate(period, reports, now);
  bool changed = false;
  for (const auto& c : summary.issued) {
    if (c.kind == ids::CountermeasureKind::kBlockNode) {
      network_blocks_[c.subject] = c.expires();
      result_.network_block_at_s.emplace(c.subject, now.seconds());
      changed = true;
    } else if (c.kind == ids::CountermeasureKind::kRulesetUpdate) {
      const auto added = ids::parse_rules(c.rule_text);
      for (auto& w : wsrs_) {
        for (const auto& r : added) {
          const bool present = std::any_of(w.rules.begin(), w.rules.end(), [&](const ids::Rule& x) { return x.id == r.id; });
          if (!present) w.rules.push_back(r);
        }
      }
    }
  }
  result_.mcc_history.push_back(std::move(summary));
  if (changed) refresh_blocks(now);
}

std::string Simulation::dump_topology() {
  std::ostringstream os;
  os << "# nodes: id kind x_m y_m\n";
  for (const auto& n : topo_.nodes()) {
    os << n.id << ' ' << net::to_string(n.kind) << ' ' << metrics::format_value(n.pos.x) << ' '
       << metrics::format_value(n.pos.y) << '\n';
  }
  os << "# links: a b\n";
  for (const auto& n : topo_.nodes()) {
    for (NodeId m : topo_.neighbors(n.id)) {
      if (m > n.id) os << n.id << ' ' << m << '\n';
    }
  }
  os << "# routes at horizon: node dest next_hop hops\n";
  for (NodeId n : topo_.routing_nodes()) {
    const auto routes = domain_->agent(n).routes(engine_.now());
    for (const auto& [dst, r] : *routes) os << n << ' ' << dst << ' ' << r.next_hop << ' ' << r.hops << '\n';
  }
  os << "# mpr sets: node mprs...\n";
  for (NodeId n : topo_.routing_nodes()) {
    os << n;
    for (NodeId m : domain_->agent(n).state().mprs) os << ' ' << m;
    os << '\n';
  }
  return os.str();
}

void Simulation::finish(RunResult& out) {
  for (auto& w : wsrs_) {
    advance(w, horizon_);
    max_residual_ = std::max(max_residual_, w.psm->ledger().identity_residual());
  }
  check_energy();

  // In-flight work is counted by scanning live packets, independently of the
  // generated/delivered/dropped counters.
  std::map<std::string, std::uint64_t> in_flight;
  for (const auto& p : pool_) {
    if (p.live) in_flight[std::string(net::to_string(p.rec.app))] += p.units;
  }
  auto& s = out.summary;
  s.label = cfg_.label;
  s.seed = cfg_.seed;
  s.horizon_s = horizon_.seconds();
  s.measured_from_s = measure_from_.seconds();
  for (auto& [app, acc] : accounting_) {
    acc.in_flight = in_flight[app];
    s.packets_by_app[app] = acc;
  }
  for (auto& [app, samples] : delays_) s.delay_by_app[app] = metrics::summarize_delays(std::move(samples));
  s.signaling_access = metrics::summarize_delays(std::move(access_delays_));
  for (const auto& a : out.alerts) {
    if (!measuring(a.at)) continue;
    ++s.alerts_by_tag[a.tag];
    ++s.alerts_by_detector[ids::to_string(a.detector)];
  }
  for (const auto& [id, at] : out.network_block_at_s) {
    (void)at;
    s.network_blocks.push_back(id);
  }
  s.max_energy_residual = max_residual_;
  s.anomaly_trained = baseline_finalized_ && !wsrs_.empty() && wsrs_.front().baseline.trained();

  for (const auto& w : wsrs_) {
    metrics::NodeReport r;
    r.id = w.id;
    r.kind = "wsr";
    r.tx_bits = w.tx_bits;
    r.rx_bits = w.rx_bits;
    r.depleted_at_s = w.depleted_at;
    r.final_fraction = w.psm->residual_fraction();
    r.depletions = w.depletions;
    r.asr_mbps = w.plan.asr_mbps;
    const auto& t = w.psm->time_in_state();
    r.active_s = (t.busy + t.idle).seconds();
    r.clock_stop_s = t.clock_stop.seconds();
    r.slot_sleep_s = t.slot_sleep.seconds();
    r.depleted_s = t.depleted.seconds();
    s.nodes.push_back(r);
  }
  if (mcc_) {
    metrics::NodeReport r;
    r.id = mcc_->id;
    r.kind = "mcc";
    r.tx_bits = mcc_->tx_bits;
    r.rx_bits = mcc_->rx_bits;
    r.final_fraction = 1.0;
    s.nodes.push_back(r);
  }
  out.tx_kbits = metrics::MetricSeries("tx_kbits", "kbit", cfg_.label, "node", "tx_kbits");
  out.rx_kbits = metrics::MetricSeries("rx_kbits", "kbit", cfg_.label, "node", "rx_kbits");
  for (const auto& w : wsrs_) {
    out.tx_kbits.add("wsr" + std::to_string(w.id), w.tx_bits / 1e3);
    out.rx_kbits.add("wsr" + std::to_string(w.id), w.rx_bits / 1e3);
  }
  out.topology_dump = dump_topology();
}

}  // namespace

RunResult run_simulation(const ScenarioConfig& cfg, const std::vector<ids::Rule>& rules) {
  Simulation sim(cfg, rules);
  return sim.run();
}

RunResult run_simulation(const ScenarioConfig& cfg) { return run_simulation(cfg, load_rules(cfg)); }

}  // namespace gemn::harness
