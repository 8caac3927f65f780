#include "gemn/harness/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gemn::harness {

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_{std::move(path)} {}

net::OlsrTimers OlsrConfig::timers() const {
  net::OlsrTimers t;
  t.hello_interval = sim::SimTime::from_seconds(hello_interval_s);
  t.tc_interval = sim::SimTime::from_seconds(tc_interval_s);
  t.neighbor_hold = sim::SimTime::from_seconds(neighbor_hold_s);
  t.topology_hold = sim::SimTime::from_seconds(topology_hold_s);
  t.duplicate_hold = sim::SimTime::from_seconds(duplicate_hold_s);
  return t;
}

energy::PlannerSettings ScenarioConfig::planner() const {
  energy::PlannerSettings s;
  s.profile = currents.profile;
  s.link_rate_mbps = radio.data_rate_mbps;
  s.slot_s = node.slot_s;
  s.horizon_h = node.dce_horizon_h;
  return s;
}

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_{j}, path_{std::move(path)} {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(join(path_, key), "expected " + expected<T>() + ", got " + it->dump());
    }
  }

  template <class T>
  void get(const char* key, std::optional<T>& out) {
    T v{};
    seen_.insert(key);
    if (!j_.contains(key)) return;
    get(key, v);
    out = v;
  }

  void number(const char* key, double& out, double lo, double hi, bool open_lo = false) {
    get(key, out);
    if (!std::isfinite(out) || out < lo || out > hi || (open_lo && out == lo)) {
      std::ostringstream os;
      os << "must lie in " << (open_lo ? "(" : "[") << lo << ", " << hi << "], got " << out;
      throw ConfigError(join(path_, key), os.str());
    }
  }

  void positive(const char* key, double& out) {
    get(key, out);
    if (!(out > 0.0) || !std::isfinite(out)) throw ConfigError(join(path_, key), "must be positive");
  }

  void nonnegative(const char* key, double& out) {
    get(key, out);
    if (!(out >= 0.0) || !std::isfinite(out)) throw ConfigError(join(path_, key), "must be nonnegative");
  }

  void integer(const char* key, int& out, int lo, int hi) {
    get(key, out);
    if (out < lo || out > hi) {
      throw ConfigError(join(path_, key),
                        "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " + std::to_string(out));
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  std::optional<Reader> child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Reader(*it, join(path_, key));
  }

  const json* raw(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  [[nodiscard]] std::string path(const char* key) const { return join(path_, key); }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      (void)v;
      if (!seen_.contains(k)) throw ConfigError(join(path_, k), "unknown key '" + k + "'");
    }
  }

 private:
  template <class T>
  static std::string expected() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else return "a value of the documented type";
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

energy::Weather weather_from(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected sunny, cloudy or rainy");
  auto w = energy::parse_weather(v.get<std::string>());
  if (!w) throw ConfigError(path, "unknown weather '" + v.get<std::string>() + "' (expected sunny, cloudy or rainy)");
  return *w;
}

net::Position position_from(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(path, "expected [x, y] in meters");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

json position_to(const net::Position& p) { return json::array({p.x, p.y}); }

void read_weather_triple(Reader& r, const char* key, std::array<double, 3>& out) {
  auto c = r.child(key);
  if (!c) return;
  c->positive("sunny", out[0]);
  c->positive("cloudy", out[1]);
  c->positive("rainy", out[2]);
  c->finish();
}

json weather_triple(const std::array<double, 3>& v) { return {{"sunny", v[0]}, {"cloudy", v[1]}, {"rainy", v[2]}}; }

void read_uniform(Reader& r, const char* key, sim::UniformDist& d) {
  const json* v = r.raw(key);
  if (!v) return;
  if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
    throw ConfigError(r.path(key), "expected [min, max]");
  }
  d.a = (*v)[0].get<double>();
  d.b = (*v)[1].get<double>();
  if (!(d.a > 0.0) || d.b < d.a) throw ConfigError(r.path(key), "expected 0 < min <= max");
}

json uniform_to(const sim::UniformDist& d) { return json::array({d.a, d.b}); }

}  // namespace

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig c;
  Reader r(j, "");
  r.get("label", c.label);
  if (c.label.empty()) throw ConfigError("label", "must not be empty");
  r.get("seed", c.seed);
  r.positive("horizon_s", c.horizon_s);
  r.number("start_hour", c.start_hour, 0.0, 24.0);
  if (c.start_hour == 24.0) throw ConfigError("start_hour", "must lie in [0, 24)");

  if (auto t = r.child("topology")) {
    std::string placement = net::to_string(c.topology.placement);
    t->get("placement", placement);
    auto p = net::parse_placement(placement);
    if (!p) throw ConfigError(t->path("placement"), "unknown placement '" + placement + "' (expected grid, random or explicit)");
    c.topology.placement = *p;
    t->integer("wsr_count", c.topology.wsr_count, 0, 100000);
    t->positive("span_m", c.topology.span_m);
    t->positive("grid_pitch_m", c.topology.grid_pitch_m);
    t->positive("random_area_m", c.topology.random_area_m);
    t->integer("max_placement_attempts", c.topology.max_attempts, 1, 1000000);
    t->get("include_mcc", c.topology.include_mcc);
    if (const json* m = t->raw("mcc_position"); m && !m->is_null()) {
      c.topology.mcc_position = position_from(*m, t->path("mcc_position"));
    }
    if (const json* ps = t->raw("positions")) {
      if (!ps->is_array()) throw ConfigError(t->path("positions"), "expected an array of [x, y]");
      c.topology.positions.clear();
      for (std::size_t i = 0; i < ps->size(); ++i) {
        c.topology.positions.push_back(position_from((*ps)[i], t->path("positions") + "[" + std::to_string(i) + "]"));
      }
    }
    t->finish();
  }
  if (c.topology.placement == net::Placement::kExplicit) {
    c.topology.wsr_count = static_cast<int>(c.topology.positions.size());
  }

  if (auto rd = r.child("radio")) {
    rd->positive("range_m", c.radio.range_m);
    rd->positive("data_rate_mbps", c.radio.data_rate_mbps);
    rd->nonnegative("per_hop_proc_delay_s", c.radio.per_hop_proc_delay_s);
    rd->finish();
  }
  if (auto o = r.child("olsr")) {
    o->positive("hello_interval_s", c.olsr.hello_interval_s);
    o->positive("tc_interval_s", c.olsr.tc_interval_s);
    o->positive("neighbor_hold_s", c.olsr.neighbor_hold_s);
    o->positive("topology_hold_s", c.olsr.topology_hold_s);
    o->positive("duplicate_hold_s", c.olsr.duplicate_hold_s);
    o->finish();
  }
  if (auto b = r.child("battery")) {
    b->positive("capacity_mAh", c.battery.capacity_mAh);
    b->positive("voltage_v", c.battery.voltage_v);
    b->number("discharge_efficiency", c.battery.discharge_efficiency, 0.0, 1.0, true);
    b->number("restart_fraction", c.battery.restart_fraction, 0.0, 1.0);
    b->finish();
  }
  if (auto p = r.child("panel")) {
    p->get("preset", c.panel.preset);
    if (c.panel.preset == "calibrated") {
      c.panel.model = energy::SolarPanelModel::calibrated();
    } else if (c.panel.preset == "raw") {
      c.panel.model = energy::SolarPanelModel::raw();
    } else {
      throw ConfigError(p->path("preset"), "unknown preset '" + c.panel.preset + "' (expected calibrated or raw)");
    }
    read_weather_triple(*p, "daily_yield_mAh", c.panel.model.daily_yield_mAh);
    read_weather_triple(*p, "raw_current_mA", c.panel.model.raw_current_mA);
    read_weather_triple(*p, "charging_hours", c.panel.model.charging_hours);
    for (double h : c.panel.model.charging_hours) {
      if (h > 24.0) throw ConfigError(p->path("charging_hours"), "must not exceed 24 h");
    }
    p->finish();
  }
  if (auto cu = r.child("currents")) {
    cu->positive("i_tx_mA", c.currents.profile.i_tx_mA);
    cu->positive("i_rx_mA", c.currents.profile.i_rx_mA);
    cu->positive("i_proc_mA", c.currents.profile.i_proc_mA);
    cu->nonnegative("i_sleep_mA", c.currents.profile.i_sleep_mA);
    cu->positive("i_active_effective_mA", c.currents.profile.i_active_effective_mA);
    cu->positive("rx_tx_ratio", c.currents.rx_tx_ratio);
    cu->finish();
  }
  if (auto n = r.child("node")) {
    n->positive("processing_rate_mbps", c.node.processing_rate_mbps);
    n->positive("packets_per_sec", c.node.packets_per_sec);
    n->get("buffer_bytes", c.node.buffer_bytes);
    n->nonnegative("wake_latency_s", c.node.wake_latency_s);
    n->positive("slot_s", c.node.slot_s);
    n->positive("dce_horizon_h", c.node.dce_horizon_h);
    n->get("managed", c.node.managed);
    n->finish();
  }
  if (const json* w = r.raw("weather")) {
    if (!w->is_array() || w->empty()) throw ConfigError("weather", "expected a non-empty array of day weather");
    c.weather.clear();
    for (std::size_t i = 0; i < w->size(); ++i) c.weather.push_back(weather_from((*w)[i], "weather[" + std::to_string(i) + "]"));
  }
  if (auto d = r.child("wsr_defaults")) {
    d->number("initial_re", c.wsr_defaults.initial_re, 0.0, 1.0);
    d->integer("panels", c.wsr_defaults.panels, 0, 1000);
    d->finish();
  }
  if (const json* ov = r.raw("wsr_overrides")) {
    if (!ov->is_array()) throw ConfigError("wsr_overrides", "expected an array");
    for (std::size_t i = 0; i < ov->size(); ++i) {
      Reader o((*ov)[i], "wsr_overrides[" + std::to_string(i) + "]");
      WsrOverride w;
      o.get("id", w.id);
      if (!o.has("id")) throw ConfigError(o.path("id"), "required");
      o.get("initial_re", w.initial_re);
      if (w.initial_re && (*w.initial_re < 0.0 || *w.initial_re > 1.0)) throw ConfigError(o.path("initial_re"), "must lie in [0, 1]");
      o.get("panels", w.panels);
      if (w.panels && *w.panels < 0) throw ConfigError(o.path("panels"), "must be nonnegative");
      o.get("managed", w.managed);
      o.finish();
      c.wsr_overrides.push_back(w);
    }
  }
  if (auto t = r.child("traffic")) {
    if (auto s = t->child("signaling")) {
      s->get("enabled", c.traffic.signaling.enabled);
      s->integer("sensors_per_wsr", c.traffic.signaling.sensors_per_wsr, 0, 1000);
      read_uniform(*s, "rate_pps", c.traffic.signaling.rate_pps);
      read_uniform(*s, "size_bits", c.traffic.signaling.size_bits);
      s->finish();
    }
    if (auto s = t->child("text")) {
      s->get("enabled", c.traffic.text.enabled);
      s->integer("clients_per_wsr", c.traffic.text.clients_per_wsr, 0, 1000);
      s->positive("interval_s", c.traffic.text.interval_s);
      read_uniform(*s, "size_bytes", c.traffic.text.size_bytes);
      s->finish();
    }
    if (auto s = t->child("image")) {
      s->get("enabled", c.traffic.image.enabled);
      s->integer("clients_per_wsr", c.traffic.image.clients_per_wsr, 0, 1000);
      s->positive("mean_interval_s", c.traffic.image.mean_interval_s);
      read_uniform(*s, "size_bytes", c.traffic.image.size_bytes);
      s->get("segment_bytes", c.traffic.image.segment_bytes);
      if (c.traffic.image.segment_bytes == 0) throw ConfigError(s->path("segment_bytes"), "must be positive");
      s->finish();
    }
    if (auto s = t->child("video")) {
      s->get("enabled", c.traffic.video.enabled);
      s->integer("every_nth_wsr", c.traffic.video.every_nth_wsr, 0, 100000);
      s->positive("fps", c.traffic.video.fps);
      read_uniform(*s, "bitrate_kbps", c.traffic.video.bitrate_kbps);
      s->number("jitter", c.traffic.video.jitter, 0.0, 0.99);
      s->finish();
    }
    t->finish();
  }
  if (const json* at = r.raw("attacks")) {
    if (!at->is_array()) throw ConfigError("attacks", "expected an array");
    for (std::size_t i = 0; i < at->size(); ++i) {
      Reader a((*at)[i], "attacks[" + std::to_string(i) + "]");
      traffic::AttackProfile p;
      std::string kind = "dos";
      a.get("kind", kind);
      auto k = traffic::parse_attack_kind(kind);
      if (!k) throw ConfigError(a.path("kind"), "unknown attack kind '" + kind + "' (expected dos or blackhole)");
      p.kind = *k;
      if (!a.has("target")) throw ConfigError(a.path("target"), "required");
      a.get("target", p.target);
      a.nonnegative("rate_multiplier", p.rate_multiplier);
      double start = 0.0;
      a.nonnegative("start_s", start);
      p.start = sim::SimTime::from_seconds(start);
      if (const json* stop = a.raw("stop_s"); stop && !stop->is_null()) {
        double s = 0.0;
        a.nonnegative("stop_s", s);
        if (s < start) throw ConfigError(a.path("stop_s"), "must not precede start_s");
        p.stop = sim::SimTime::from_seconds(s);
      }
      a.get("packet_bits", p.packet_bits);
      if (p.packet_bits == 0) throw ConfigError(a.path("packet_bits"), "must be positive");
      a.get("tag", p.tag);
      if (const json* pos = a.raw("position"); pos && !pos->is_null()) p.position = position_from(*pos, a.path("position"));
      a.positive("chunk_s", p.chunk_s);
      a.finish();
      c.attacks.push_back(p);
    }
  }
  if (auto e = r.child("echids")) {
    e->get("enabled", c.echids.enabled);
    e->positive("window_s", c.echids.window_s);
    e->positive("report_period_s", c.echids.report_period_s);
    e->positive("gap_threshold_s", c.echids.gap_threshold_s);
    e->nonnegative("baseline_training_s", c.echids.baseline_training_s);
    e->get("rules_path", c.echids.rules_path);
    e->get("rules", c.echids.rules);
    if (auto a = e->child("anomaly")) {
      a->positive("k", c.echids.anomaly.k);
      a->positive("floor_bps", c.echids.anomaly.floor_bps);
      a->integer("severity", c.echids.anomaly.severity, 1, 5);
      a->finish();
    }
    if (auto b = e->child("behavior")) {
      b->number("theta_bh", c.echids.behavior.theta_bh, 0.0, 1.0);
      b->get("min_transit", c.echids.behavior.min_transit);
      b->positive("margin", c.echids.behavior.margin);
      b->integer("sustain_s", c.echids.behavior.sustain_s, 1, 1000000);
      b->number("observation_probability", c.echids.behavior.observation_probability, 0.0, 1.0);
      b->integer("severity", c.echids.behavior.severity, 1, 5);
      b->finish();
    }
    if (auto f = e->child("fusion")) {
      f->integer("block_threshold", c.echids.fusion.block_threshold, 1, 6);
      f->finish();
    }
    if (auto m = e->child("mcc")) {
      m->integer("quorum", c.echids.mcc.quorum, 1, 100000);
      m->integer("quorum_memory_periods", c.echids.mcc.quorum_memory_periods, 1, 100000);
      double ttl = c.echids.mcc.block_ttl.seconds();
      m->positive("block_ttl_s", ttl);
      c.echids.mcc.block_ttl = sim::SimTime::from_seconds(ttl);
      if (const json* lib = m->raw("rule_library")) {
        if (!lib->is_object()) throw ConfigError(m->path("rule_library"), "expected an object of tag -> rule");
        c.echids.mcc.rule_library.clear();
        for (const auto& [tag, rule] : lib->items()) {
          if (!rule.is_string()) throw ConfigError(m->path("rule_library") + "." + tag, "expected rule text");
          c.echids.mcc.rule_library[tag] = rule.get<std::string>();
        }
      }
      m->finish();
    }
    e->finish();
  }
  if (auto d = r.child("dos_sweep")) {
    if (const json* m = d->raw("multipliers")) {
      if (!m->is_array() || m->empty()) throw ConfigError(d->path("multipliers"), "expected a non-empty array");
      c.dos_sweep.multipliers.clear();
      for (const auto& v : *m) {
        if (!v.is_number() || v.get<double>() <= 0.0) throw ConfigError(d->path("multipliers"), "multipliers must be positive numbers");
        c.dos_sweep.multipliers.push_back(v.get<double>());
      }
    }
    d->number("target_initial_re", c.dos_sweep.target_initial_re, 0.0, 1.0, true);
    d->integer("target_panels", c.dos_sweep.target_panels, 0, 1000);
    if (const json* w = d->raw("target_weather")) c.dos_sweep.target_weather = weather_from(*w, d->path("target_weather"));
    d->positive("max_hours", c.dos_sweep.max_hours);
    d->finish();
  }
  if (auto o = r.child("output")) {
    o->get("dir", c.output.dir);
    o->positive("trace_interval_s", c.output.trace_interval_s);
    o->finish();
  }
  r.finish();
  validate(c);
  return c;
}

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["label"] = c.label;
  j["seed"] = c.seed;
  j["horizon_s"] = c.horizon_s;
  j["start_hour"] = c.start_hour;

  json t;
  t["placement"] = net::to_string(c.topology.placement);
  t["wsr_count"] = c.topology.wsr_count;
  t["span_m"] = c.topology.span_m;
  t["grid_pitch_m"] = c.topology.grid_pitch_m;
  t["random_area_m"] = c.topology.random_area_m;
  t["max_placement_attempts"] = c.topology.max_attempts;
  t["include_mcc"] = c.topology.include_mcc;
  t["mcc_position"] = c.topology.mcc_position ? position_to(*c.topology.mcc_position) : json(nullptr);
  t["positions"] = json::array();
  for (const auto& p : c.topology.positions) t["positions"].push_back(position_to(p));
  j["topology"] = t;

  j["radio"] = {{"range_m", c.radio.range_m},
                {"data_rate_mbps", c.radio.data_rate_mbps},
                {"per_hop_proc_delay_s", c.radio.per_hop_proc_delay_s}};
  j["olsr"] = {{"hello_interval_s", c.olsr.hello_interval_s},   {"tc_interval_s", c.olsr.tc_interval_s},
               {"neighbor_hold_s", c.olsr.neighbor_hold_s},     {"topology_hold_s", c.olsr.topology_hold_s},
               {"duplicate_hold_s", c.olsr.duplicate_hold_s}};
  j["battery"] = {{"capacity_mAh", c.battery.capacity_mAh},
                  {"voltage_v", c.battery.voltage_v},
                  {"discharge_efficiency", c.battery.discharge_efficiency},
                  {"restart_fraction", c.battery.restart_fraction}};
  j["panel"] = {{"preset", c.panel.preset},
                {"daily_yield_mAh", weather_triple(c.panel.model.daily_yield_mAh)},
                {"raw_current_mA", weather_triple(c.panel.model.raw_current_mA)},
                {"charging_hours", weather_triple(c.panel.model.charging_hours)}};
  const auto& cp = c.currents.profile;
  j["currents"] = {{"i_tx_mA", cp.i_tx_mA},     {"i_rx_mA", cp.i_rx_mA},       {"i_proc_mA", cp.i_proc_mA},
                   {"i_sleep_mA", cp.i_sleep_mA}, {"i_active_effective_mA", cp.i_active_effective_mA},
                   {"rx_tx_ratio", c.currents.rx_tx_ratio}};
  j["node"] = {{"processing_rate_mbps", c.node.processing_rate_mbps},
               {"packets_per_sec", c.node.packets_per_sec},
               {"buffer_bytes", c.node.buffer_bytes},
               {"wake_latency_s", c.node.wake_latency_s},
               {"slot_s", c.node.slot_s},
               {"dce_horizon_h", c.node.dce_horizon_h},
               {"managed", c.node.managed}};
  j["weather"] = json::array();
  for (auto w : c.weather) j["weather"].push_back(std::string(energy::to_string(w)));
  j["wsr_defaults"] = {{"initial_re", c.wsr_defaults.initial_re}, {"panels", c.wsr_defaults.panels}};
  j["wsr_overrides"] = json::array();
  for (const auto& o : c.wsr_overrides) {
    json e{{"id", o.id}};
    if (o.initial_re) e["initial_re"] = *o.initial_re;
    if (o.panels) e["panels"] = *o.panels;
    if (o.managed) e["managed"] = *o.managed;
    j["wsr_overrides"].push_back(e);
  }

  const auto& tr = c.traffic;
  j["traffic"] = {
      {"signaling",
       {{"enabled", tr.signaling.enabled},
        {"sensors_per_wsr", tr.signaling.sensors_per_wsr},
        {"rate_pps", uniform_to(tr.signaling.rate_pps)},
        {"size_bits", uniform_to(tr.signaling.size_bits)}}},
      {"text",
       {{"enabled", tr.text.enabled},
        {"clients_per_wsr", tr.text.clients_per_wsr},
        {"interval_s", tr.text.interval_s},
        {"size_bytes", uniform_to(tr.text.size_bytes)}}},
      {"image",
       {{"enabled", tr.image.enabled},
        {"clients_per_wsr", tr.image.clients_per_wsr},
        {"mean_interval_s", tr.image.mean_interval_s},
        {"size_bytes", uniform_to(tr.image.size_bytes)},
        {"segment_bytes", tr.image.segment_bytes}}},
      {"video",
       {{"enabled", tr.video.enabled},
        {"every_nth_wsr", tr.video.every_nth_wsr},
        {"fps", tr.video.fps},
        {"bitrate_kbps", uniform_to(tr.video.bitrate_kbps)},
        {"jitter", tr.video.jitter}}}};

  j["attacks"] = json::array();
  for (const auto& a : c.attacks) {
    json e{{"kind", traffic::to_string(a.kind)},
           {"target", a.target},
           {"rate_multiplier", a.rate_multiplier},
           {"start_s", a.start.seconds()},
           {"stop_s", a.stop == sim::SimTime::max() ? json(nullptr) : json(a.stop.seconds())},
           {"packet_bits", a.packet_bits},
           {"tag", a.tag},
           {"position", a.position ? position_to(*a.position) : json(nullptr)},
           {"chunk_s", a.chunk_s}};
    j["attacks"].push_back(e);
  }

  const auto& e = c.echids;
  j["echids"] = {{"enabled", e.enabled},
                 {"window_s", e.window_s},
                 {"report_period_s", e.report_period_s},
                 {"gap_threshold_s", e.gap_threshold_s},
                 {"baseline_training_s", e.baseline_training_s},
                 {"rules_path", e.rules_path},
                 {"rules", e.rules},
                 {"anomaly", {{"k", e.anomaly.k}, {"floor_bps", e.anomaly.floor_bps}, {"severity", e.anomaly.severity}}},
                 {"behavior",
                  {{"theta_bh", e.behavior.theta_bh},
                   {"min_transit", e.behavior.min_transit},
                   {"margin", e.behavior.margin},
                   {"sustain_s", e.behavior.sustain_s},
                   {"observation_probability", e.behavior.observation_probability},
                   {"severity", e.behavior.severity}}},
                 {"fusion", {{"block_threshold", e.fusion.block_threshold}}},
                 {"mcc",
                  {{"quorum", e.mcc.quorum},
                   {"quorum_memory_periods", e.mcc.quorum_memory_periods},
                   {"block_ttl_s", e.mcc.block_ttl.seconds()},
                   {"rule_library", e.mcc.rule_library}}}};
  j["dos_sweep"] = {{"multipliers", c.dos_sweep.multipliers},
                    {"target_initial_re", c.dos_sweep.target_initial_re},
                    {"target_panels", c.dos_sweep.target_panels},
                    {"target_weather", std::string(energy::to_string(c.dos_sweep.target_weather))},
                    {"max_hours", c.dos_sweep.max_hours}};
  j["output"] = {{"dir", c.output.dir}, {"trace_interval_s", c.output.trace_interval_s}};
  return j;
}

ScenarioConfig parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto cfg = parse_scenario(ss.str());
  // Relative rule paths resolve against the scenario's directory.
  if (!cfg.echids.rules_path.empty() && std::filesystem::path(cfg.echids.rules_path).is_relative()) {
    cfg.echids.rules_path = (path.parent_path() / cfg.echids.rules_path).lexically_normal().string();
  }
  return cfg;
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  static const std::map<std::string, std::string> kAliases{
      {"link_rate", "radio.data_rate_mbps"}, {"range", "radio.range_m"},       {"seed", "seed"},
      {"horizon", "horizon_s"},              {"wsr_count", "topology.wsr_count"}, {"panels", "wsr_defaults.panels"},
      {"initial_re", "wsr_defaults.initial_re"}};
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("", "override must look like key=value: " + assignment);
  std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  if (auto a = kAliases.find(key); a != kAliases.end()) key = a->second;

  json j = scenario_to_json(cfg);
  json* node = &j;
  std::string walked;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    walked = join(walked, part);
    if (!node->is_object() || !node->contains(part)) throw ConfigError(walked, "unknown key '" + part + "'");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  *node = value;
  cfg = scenario_from_json(j);
}

void validate(const ScenarioConfig& c) {
  if (c.topology.placement != net::Placement::kExplicit && c.topology.wsr_count < 1 && c.topology.include_mcc == false) {
    throw ConfigError("topology.wsr_count", "a scenario needs at least one node");
  }
  const auto wsrs = static_cast<std::uint32_t>(c.topology.wsr_count);
  for (std::size_t i = 0; i < c.wsr_overrides.size(); ++i) {
    if (c.wsr_overrides[i].id >= wsrs) {
      throw ConfigError("wsr_overrides[" + std::to_string(i) + "].id",
                        "no WSR with id " + std::to_string(c.wsr_overrides[i].id));
    }
  }
  for (std::size_t i = 0; i < c.attacks.size(); ++i) {
    if (c.attacks[i].target >= wsrs) {
      throw ConfigError("attacks[" + std::to_string(i) + "].target",
                        "target must be a WSR id below " + std::to_string(wsrs));
    }
  }
  if (c.node.slot_s > 86400.0) throw ConfigError("node.slot_s", "must not exceed one day");
  if (c.echids.report_period_s < c.echids.window_s) {
    throw ConfigError("echids.report_period_s", "must be at least one detection window");
  }
  try {
    traffic::validate(c.traffic);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("traffic", e.what());
  }
}

}  // namespace gemn::harness
