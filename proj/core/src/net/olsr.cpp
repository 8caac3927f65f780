#include "gemn/net/olsr.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "gemn/sim/engine.hpp"

namespace gemn::net {

namespace {
constexpr double kHeaderBytes = 12.0;
constexpr double kAddressBytes = 4.0;
}  // namespace

double HelloMessage::size_bits() const {
  return 8.0 * (kHeaderBytes + kAddressBytes * static_cast<double>(heard.size() + symmetric.size() + mprs.size()));
}

double TcMessage::size_bits() const {
  return 8.0 * (kHeaderBytes + kAddressBytes * static_cast<double>(advertised.size()));
}

std::set<NodeId> OlsrState::symmetric_neighbors() const {
  std::set<NodeId> out;
  for (const auto& [id, n] : neighbors) {
    if (n.symmetric) out.insert(id);
  }
  return out;
}

std::set<NodeId> mpr_select(const std::set<NodeId>& neighbors,
                            const std::map<NodeId, std::set<NodeId>>& two_hop_map) {
  std::map<NodeId, std::vector<NodeId>> reachers;  // 2-hop node -> neighbors reaching it
  for (const auto& [nb, reach] : two_hop_map) {
    if (!neighbors.contains(nb)) continue;
    for (NodeId t : reach) {
      if (!neighbors.contains(t)) reachers[t].push_back(nb);
    }
  }

  std::set<NodeId> mprs;
  std::set<NodeId> uncovered;
  for (const auto& [t, rs] : reachers) {
    if (rs.size() == 1) mprs.insert(rs.front());
    uncovered.insert(t);
  }
  auto cover = [&](NodeId mpr) {
    auto it = two_hop_map.find(mpr);
    if (it == two_hop_map.end()) return;
    for (NodeId t : it->second) uncovered.erase(t);
  };
  for (NodeId m : mprs) cover(m);

  while (!uncovered.empty()) {
    NodeId best = sim::kNoNode;
    std::size_t best_count = 0;
    for (const auto& [nb, reach] : two_hop_map) {
      if (!neighbors.contains(nb) || mprs.contains(nb)) continue;
      std::size_t c = 0;
      for (NodeId t : reach) c += uncovered.contains(t) ? 1 : 0;
      if (c > best_count) {  // map order gives lowest id on ties
        best = nb;
        best_count = c;
      }
    }
    if (best == sim::kNoNode) break;
    mprs.insert(best);
    cover(best);
  }
  return mprs;
}

RoutingTable compute_routes(NodeId self, const OlsrState& state, const std::set<NodeId>& blocked) {
  RoutingTable table;
  auto usable = [&](NodeId n) { return n != self && !blocked.contains(n); };

  for (const auto& [nb, tuple] : state.neighbors) {
    if (tuple.symmetric && usable(nb)) table[nb] = Route{nb, 1};
  }
  for (const auto& [nb, reach] : state.two_hop) {
    auto it = table.find(nb);
    if (it == table.end() || it->second.hops != 1) continue;
    for (const auto& [t, exp] : reach) {
      (void)exp;
      if (usable(t) && !table.contains(t)) table[t] = Route{nb, 2};
    }
  }

  for (int h = 2;; ++h) {
    std::map<NodeId, NodeId> found;  // dest -> lowest next hop
    for (const auto& [origin, tuple] : state.topology) {
      auto it = table.find(origin);
      if (it == table.end() || it->second.hops != h) continue;
      for (NodeId d : tuple.advertised) {
        if (!usable(d) || table.contains(d)) continue;
        auto [f, inserted] = found.emplace(d, it->second.next_hop);
        if (!inserted) f->second = std::min(f->second, it->second.next_hop);
      }
    }
    if (found.empty()) break;
    for (const auto& [d, nh] : found) table[d] = Route{nh, h + 1};
  }
  return table;
}

OlsrAgent::OlsrAgent(NodeId self, OlsrTimers timers) : self_{self}, timers_{timers} {}

void OlsrAgent::expire(SimTime now) {
  if (now < next_expiry_) return;
  bool changed = false;
  for (auto it = state_.neighbors.begin(); it != state_.neighbors.end();) {
    if (it->second.expires <= now) {
      state_.two_hop.erase(it->first);
      state_.mpr_selectors.erase(it->first);
      it = state_.neighbors.erase(it);
      changed = true;
    } else {
      ++it;
    }
  }
  for (auto& [nb, reach] : state_.two_hop) {
    std::erase_if(reach, [&](const auto& kv) {
      if (kv.second > now) return false;
      changed = true;
      return true;
    });
  }
  std::erase_if(state_.mpr_selectors, [&](const auto& kv) {
    if (kv.second > now) return false;
    changed = true;
    return true;
  });
  std::erase_if(state_.topology, [&](const auto& kv) {
    if (kv.second.expires > now) return false;
    changed = true;
    return true;
  });
  std::erase_if(state_.duplicates, [&](const auto& kv) { return kv.second.expires <= now; });
  next_expiry_ = SimTime::max();
  for (const auto& [id, n] : state_.neighbors) note_expiry(n.expires);
  for (const auto& [nb, reach] : state_.two_hop) {
    for (const auto& [t, exp] : reach) note_expiry(exp);
  }
  for (const auto& [id, exp] : state_.mpr_selectors) note_expiry(exp);
  for (const auto& [id, t] : state_.topology) note_expiry(t.expires);
  for (const auto& [key, d] : state_.duplicates) note_expiry(d.expires);
  if (changed) {
    refresh_mprs();
    dirty_ = true;
  }
}

void OlsrAgent::refresh_mprs() {
  std::set<NodeId> sym;
  for (NodeId n : state_.symmetric_neighbors()) {
    if (!blocked_.contains(n)) sym.insert(n);
  }
  std::map<NodeId, std::set<NodeId>> reach;
  for (const auto& [nb, two] : state_.two_hop) {
    if (!sym.contains(nb)) continue;
    auto& r = reach[nb];
    for (const auto& [t, exp] : two) {
      (void)exp;
      if (t != self_ && !sym.contains(t) && !blocked_.contains(t)) r.insert(t);
    }
  }
  state_.mprs = mpr_select(sym, reach);
}

HelloMessage OlsrAgent::make_hello(SimTime now) {
  expire(now);
  HelloMessage msg;
  msg.origin = self_;
  for (const auto& [id, n] : state_.neighbors) (n.symmetric ? msg.symmetric : msg.heard).push_back(id);
  msg.mprs.assign(state_.mprs.begin(), state_.mprs.end());
  return msg;
}

void OlsrAgent::on_hello(const HelloMessage& msg, SimTime now) {
  if (msg.origin == self_) return;
  expire(now);
  const auto listed = [&](const std::vector<NodeId>& v) { return std::find(v.begin(), v.end(), self_) != v.end(); };
  const bool symmetric = listed(msg.heard) || listed(msg.symmetric);
  auto& tuple = state_.neighbors[msg.origin];
  const bool was_symmetric = tuple.symmetric;
  tuple.symmetric = symmetric;
  tuple.expires = now + timers_.neighbor_hold;
  note_expiry(tuple.expires);

  bool changed = was_symmetric != symmetric;
  if (symmetric) {
    std::map<NodeId, SimTime> reach;
    for (NodeId t : msg.symmetric) {
      if (t != self_) reach[t] = now + timers_.neighbor_hold;
    }
    note_expiry(now + timers_.neighbor_hold);
    auto& current = state_.two_hop[msg.origin];
    auto same_keys = [](const auto& a, const auto& b) {
      return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(),
                                                [](const auto& x, const auto& y) { return x.first == y.first; });
    };
    if (!same_keys(current, reach)) changed = true;
    current = std::move(reach);
    if (listed(msg.mprs)) {
      state_.mpr_selectors[msg.origin] = now + timers_.neighbor_hold;
    } else {
      state_.mpr_selectors.erase(msg.origin);
    }
  } else {
    if (state_.two_hop.erase(msg.origin) > 0) changed = true;
    state_.mpr_selectors.erase(msg.origin);
  }
  if (changed) {
    refresh_mprs();
    dirty_ = true;
  }
}

std::optional<TcMessage> OlsrAgent::make_tc(SimTime now) {
  expire(now);
  std::set<NodeId> advertised;
  for (const auto& [id, exp] : state_.mpr_selectors) {
    (void)exp;
    advertised.insert(id);
  }
  if (advertised.empty()) return std::nullopt;
  if (advertised != advertised_last_) {
    ++ansn_;
    advertised_last_ = advertised;
  }
  TcMessage msg;
  msg.origin = self_;
  msg.ansn = ansn_;
  msg.sequence = ++sequence_;
  msg.advertised.assign(advertised.begin(), advertised.end());
  state_.duplicates[{self_, msg.sequence}] = DuplicateTuple{now + timers_.duplicate_hold, true};
  note_expiry(now + timers_.duplicate_hold);
  return msg;
}

bool OlsrAgent::on_tc(const TcMessage& msg, NodeId from, SimTime now) {
  if (msg.origin == self_) return false;
  expire(now);
  auto nb = state_.neighbors.find(from);
  if (nb == state_.neighbors.end() || !nb->second.symmetric) return false;
  const auto key = std::make_pair(msg.origin, msg.sequence);
  auto dup = state_.duplicates.find(key);
  if (dup == state_.duplicates.end()) {
    dup = state_.duplicates.emplace(key, DuplicateTuple{now + timers_.duplicate_hold, false}).first;
    note_expiry(now + timers_.duplicate_hold);
    auto it = state_.topology.find(msg.origin);
    // 16-bit serial-number comparison for the advertised sequence number.
    const bool stale = it != state_.topology.end() &&
                       static_cast<std::int16_t>(static_cast<std::uint16_t>(msg.ansn - it->second.ansn)) < 0;
    if (!stale) {
      auto& tuple = state_.topology[msg.origin];
      if (tuple.advertised != msg.advertised || tuple.ansn != msg.ansn) dirty_ = true;
      tuple.ansn = msg.ansn;
      tuple.advertised = msg.advertised;
      tuple.expires = now + timers_.topology_hold;
      note_expiry(tuple.expires);
    }
  }
  // A copy heard first from a non-selector may still be relayed when it
  // later arrives from a selector.
  if (dup->second.retransmitted || msg.ttl <= 1 || !state_.mpr_selectors.contains(from)) return false;
  dup->second.retransmitted = true;
  return true;
}

void OlsrAgent::set_blocked(std::set<NodeId> blocked) {
  if (blocked == blocked_) return;
  blocked_ = std::move(blocked);
  refresh_mprs();
  dirty_ = true;
}

std::shared_ptr<const RoutingTable> OlsrAgent::routes(SimTime now) {
  expire(now);
  if (dirty_ || !table_) {
    table_ = std::make_shared<const RoutingTable>(compute_routes(self_, state_, blocked_));
    dirty_ = false;
    ++computations_;
  }
  return table_;
}

OlsrDomain::OlsrDomain(const Topology& topology, OlsrTimers timers, Hooks hooks)
    : topology_{&topology}, timers_{timers}, hooks_{std::move(hooks)} {
  for (NodeId id : topology.routing_nodes()) agents_.emplace(id, OlsrAgent(id, timers));
}

bool OlsrDomain::participates(NodeId node) const { return agents_.contains(node); }

OlsrAgent& OlsrDomain::agent(NodeId node) {
  auto it = agents_.find(node);
  if (it == agents_.end()) throw std::out_of_range("node " + std::to_string(node) + " runs no routing agent");
  return it->second;
}

const OlsrAgent& OlsrDomain::agent(NodeId node) const {
  auto it = agents_.find(node);
  if (it == agents_.end()) throw std::out_of_range("node " + std::to_string(node) + " runs no routing agent");
  return it->second;
}

SimTime OlsrDomain::hello_phase(NodeId node) { return SimTime::from_us(static_cast<std::int64_t>(node % 200) * 7919); }

SimTime OlsrDomain::tc_phase(NodeId node) {
  return SimTime::from_ns(500'000'000) + SimTime::from_us(static_cast<std::int64_t>(node % 200) * 6007);
}

void OlsrDomain::emit_hello(NodeId node, SimTime now) {
  if (!participates(node) || !alive(node)) return;
  const HelloMessage msg = agent(node).make_hello(now);
  const double bits = msg.size_bits();
  ++counters_.hello_sent;
  counters_.control_bits += bits;
  if (hooks_.on_tx) hooks_.on_tx(node, bits);
  for (NodeId nb : topology_->neighbors(node)) {
    if (!participates(nb) || !alive(nb)) continue;
    if (hooks_.on_rx) hooks_.on_rx(nb, bits);
    agent(nb).on_hello(msg, now);
  }
}

void OlsrDomain::emit_tc(NodeId node, SimTime now) {
  if (!participates(node) || !alive(node)) return;
  auto first = agent(node).make_tc(now);
  if (!first) return;
  ++counters_.tc_originated;
  std::deque<std::pair<NodeId, TcMessage>> pending;
  pending.emplace_back(node, *first);
  bool originator = true;
  while (!pending.empty()) {
    auto [sender, msg] = std::move(pending.front());
    pending.pop_front();
    const double bits = msg.size_bits();
    if (!originator) ++counters_.tc_forwarded;
    originator = false;
    counters_.control_bits += bits;
    if (hooks_.on_tx) hooks_.on_tx(sender, bits);
    for (NodeId nb : topology_->neighbors(sender)) {
      if (!participates(nb) || !alive(nb)) continue;
      if (hooks_.on_rx) hooks_.on_rx(nb, bits);
      if (agent(nb).on_tc(msg, sender, now)) {
        TcMessage fwd = msg;
        fwd.ttl -= 1;
        pending.emplace_back(nb, std::move(fwd));
      }
    }
  }
}

void OlsrDomain::run_until(SimTime horizon) {
  struct Due {
    SimTime at;
    bool tc;
    NodeId node;
    bool operator>(const Due& o) const { return std::tie(at, tc, node) > std::tie(o.at, o.tc, o.node); }
  };
  std::vector<Due> heap;
  for (const auto& [id, a] : agents_) {
    (void)a;
    heap.push_back({hello_phase(id), false, id});
    heap.push_back({tc_phase(id), true, id});
  }
  std::make_heap(heap.begin(), heap.end(), std::greater<>{});
  while (!heap.empty() && heap.front().at <= horizon) {
    std::pop_heap(heap.begin(), heap.end(), std::greater<>{});
    Due d = heap.back();
    heap.pop_back();
    if (d.tc) {
      emit_tc(d.node, d.at);
      d.at = d.at + timers_.tc_interval;
    } else {
      emit_hello(d.node, d.at);
      d.at = d.at + timers_.hello_interval;
    }
    heap.push_back(d);
    std::push_heap(heap.begin(), heap.end(), std::greater<>{});
  }
}

}  // namespace gemn::net
