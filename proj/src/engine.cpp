#include "ecsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>

#include "ecsim/cache.hpp"
#include "ecsim/cluster.hpp"
#include "ecsim/rng.hpp"
#include "ecsim/scheduler.hpp"
#include "ecsim/topology.hpp"
#include "ecsim/traffic.hpp"

namespace ecsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
// Absorbs rounding when locating a time inside a periodic window.
constexpr double kSlack = 1e-9;
}  // namespace

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Active: return "Active";
    case Phase::Idle: return "Idle";
    case Phase::Sleep: return "Sleep";
  }
  return "?";
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::PacketArrival: return "PacketArrival";
    case EventKind::TxComplete: return "TxComplete";
    case EventKind::SlotBoundary: return "SlotBoundary";
    case EventKind::RoundSetup: return "RoundSetup";
    case EventKind::SleepExpiry: return "SleepExpiry";
    case EventKind::IdleExpiry: return "IdleExpiry";
    case EventKind::MobilityStep: return "MobilityStep";
    case EventKind::NodeDeath: return "NodeDeath";
    case EventKind::CacheDelivery: return "CacheDelivery";
  }
  return "?";
}

PhaseDirective dispatch_scheme(const Scheme& scheme, double now_s, const DispatchContext& ctx) {
  switch (scheme.kind) {
    case SchemeKind::AlwaysOn:
      return {Phase::Active, kInf};
    case SchemeKind::TrafficAware:
      if (ctx.assigned_sleep_s) return {Phase::Sleep, now_s + *ctx.assigned_sleep_s};
      return {Phase::Idle, kInf};
    case SchemeKind::PeriodicSleepWake: {
      if (scheme.duty >= 1.0) return {Phase::Active, kInf};
      const double k = std::floor(now_s / scheme.period_s + kSlack);
      const double start = k * scheme.period_s;
      const double awake_end = start + scheme.duty * scheme.period_s;
      if (now_s < awake_end - kSlack) return {Phase::Active, awake_end};
      return {Phase::Sleep, (k + 1.0) * scheme.period_s};
    }
    case SchemeKind::CoordinatedDutyCycle: {
      const double frame = scheme.listen_s + scheme.sleep_s;
      double round_start = ctx.round_start_s;
      if (std::isfinite(ctx.round_s)) {
        round_start += std::floor((now_s - round_start) / ctx.round_s + kSlack) * ctx.round_s;
      }
      const double since = now_s - round_start;
      const double k = std::floor(since / frame + kSlack);
      const double start = round_start + k * frame;
      const double round_end = round_start + ctx.round_s;
      const double listen_end = std::min(start + scheme.listen_s, round_end);
      if (now_s < listen_end - kSlack) return {Phase::Active, listen_end};
      return {Phase::Sleep, std::min(start + frame, round_end)};
    }
  }
  return {Phase::Active, kInf};
}

const Event& EventQueue::push(double time_s, EventKind kind, NodeId node, std::uint64_t arg) {
  heap_.push(Event{time_s, next_seq_++, kind, node, arg});
  return heap_.top();
}

Event EventQueue::pop() {
  Event e = heap_.top();
  heap_.pop();
  return e;
}

namespace {

struct Transmission {
  Packet packet;
  NodeId from;
  NodeId to;
  double started_at_s = 0.0;
};

struct PacketMeta {
  double arrived_at_s = 0.0;  // at the current holder
  double hosting_s = 0.0;     // of the hop in flight
  std::vector<HopDelay> hops;
  std::vector<NodeId> visited;
};

struct NodeState {
  bool alive = true;
  Phase phase = Phase::Idle;
  RadioMode mode = RadioMode::Idle;
  double mode_since_s = 0.0;
  bool tx_busy = false;
  std::uint64_t tx_id = 0;
  int rx_count = 0;
  std::deque<Packet> queue;
  std::vector<Packet> stalled;  // no route to the destination
  std::uint64_t phase_token = 0;
  std::uint64_t death_token = 0;
  bool wait_slot = false;
  bool sleep_deferred = false;
  double active_since_s = 0.0;
  double slot_active_s = 0.0;
  std::optional<double> path_delay_sup;
  std::deque<std::pair<double, double>> path_delays;  // windowed variant
  SlidingMax capacity_sup{1.0};
};

struct ClusterRuntime {
  Cluster cluster;
  int hops = 1;
  std::optional<double> max_dp;
  double t_idle = 0.0;
  std::vector<double> sleep_history;
  int evals = 0;
};

class Simulation {
public:
  Simulation(const ScenarioConfig& config, std::uint64_t seed, const RunOptions& options);
  SimulationResult run();

private:
  bool traffic_aware() const { return cfg_.scheme.kind == SchemeKind::TrafficAware; }
  NodeState& node(NodeId n) { return nodes_[n.value]; }
  bool awake(NodeId n) const {
    const NodeState& s = nodes_[n.value];
    return s.alive && s.phase != Phase::Sleep;
  }
  NodeId id(std::size_t i) const { return NodeId(static_cast<std::uint32_t>(i)); }

  void emit(TraceEvent e);
  void set_mode(NodeId n, RadioMode m);
  void refresh_mode(NodeId n);
  void set_phase(NodeId n, Phase p);
  void predict_death(NodeId n);
  void die(NodeId n);
  void reelect_after_death(NodeId n);
  void lose(NodeId at, const Packet& p, LossReason reason);

  double capacity(NodeId a, NodeId b) const;
  double capacity_sum(NodeId n) const;
  void observe_capacities();
  void observe_path_delay(NodeId n, double d);
  std::optional<double> path_delay_max(NodeId n);
  const Router& router();
  void topology_changed();

  void try_send(NodeId h);
  void handle_sleeping_hop(NodeId holder, NodeId target, const Packet& p);
  void start_tx(NodeId from, NodeId to, const Packet& p);
  void deliver(const Packet& p);
  void flush(NodeId n);

  std::vector<double> pending_bits();
  void evaluate(NodeId n);
  void go_sleep(NodeId n, double computed_s, std::optional<double> min_hosting);
  void wake(NodeId n);
  void drain(NodeId n);
  void baseline_listen_end(NodeId n);
  void apply_directive(NodeId n);
  void after_event();

  void on_round_setup(const Event& e);
  void on_slot_boundary(const Event& e);
  void on_mobility();
  void on_arrival(const Event& e);
  void on_tx_complete(const Event& e);

  ScenarioConfig cfg_;
  std::uint64_t seed_;
  RunOptions options_;
  Accumulators acc_;
  std::vector<TraceRecord> trace_;
  EventQueue events_;
  double now_ = 0.0;

  Grid grid_;
  ConnectivityGraph graph_;
  std::unique_ptr<Router> router_;
  Rng mobility_rng_;
  std::map<std::pair<NodeId, NodeId>, double> link_overrides_;

  std::vector<NodeState> nodes_;
  std::vector<CacheStore> caches_;
  std::vector<Packet> packets_;
  std::map<std::uint64_t, PacketMeta> meta_;
  std::map<std::uint64_t, Transmission> transmissions_;
  std::uint64_t next_tx_ = 1;

  ActivityLedger activity_;
  ServiceLedger service_;
  int round_ = 0;
  std::vector<ClusterRuntime> clusters_;
  std::vector<int> cluster_of_;
};

Simulation::Simulation(const ScenarioConfig& config, std::uint64_t seed,
                       const RunOptions& options)
    : cfg_(config),
      seed_(seed),
      options_(options),
      acc_(config, seed),
      grid_(config.grid_width, config.grid_height),
      mobility_rng_(Rng::stream(seed, 4)),
      activity_(config.slots, config.round_s / config.slots) {
  const std::size_t n = static_cast<std::size_t>(cfg_.nodes);
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    caches_.emplace_back(id(i), cfg_.cache_capacity_bits);
    nodes_[i].capacity_sup = SlidingMax(cfg_.capacity_observation_window());
  }
  for (const LinkOverride& lo : cfg_.link_overrides) {
    link_overrides_[std::minmax(lo.a, lo.b)] = lo.capacity_bps;
  }

  Rng placement = Rng::stream(seed, 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!cfg_.placements.empty()) {
      grid_.place(id(i), cfg_.placements[i]);
    } else {
      const auto cell = static_cast<int>(
          placement.index(static_cast<std::uint64_t>(cfg_.grid_width) * cfg_.grid_height));
      grid_.place(id(i), {cell % cfg_.grid_width, cell / cfg_.grid_width});
    }
  }
  graph_ = ConnectivityGraph::from_grid(grid_);

  std::vector<FlowSpec> flows = cfg_.flows;
  Rng flow_rng = Rng::stream(seed, 2);
  for (int i = 0; i < cfg_.random_flows.count; ++i) {
    FlowSpec f;
    const auto src = flow_rng.index(n);
    auto dst = flow_rng.index(n - 1);
    if (dst >= src) ++dst;
    f.src = id(src);
    f.dst = id(dst);
    f.rate_pps = cfg_.random_flows.rate_pps;
    f.packet_bits = cfg_.random_flows.packet_bits;
    f.delay_sensitive_fraction = cfg_.random_flows.delay_sensitive_fraction;
    f.burst = cfg_.random_flows.burst;
    flows.push_back(f);
  }
  Rng traffic_rng = Rng::stream(seed, 3);
  packets_ = generate(flows, cfg_.horizon_s, traffic_rng, cfg_.deadline_offset_s());
}

void Simulation::emit(TraceEvent e) {
  TraceRecord rec{now_, std::move(e)};
  acc_.apply(rec);
  if (options_.keep_trace) trace_.push_back(std::move(rec));
}

void Simulation::set_mode(NodeId n, RadioMode m) {
  NodeState& s = node(n);
  if (!s.alive || s.mode == m) return;
  emit(trace::ModeChange{n, s.mode, m, now_ - s.mode_since_s});
  s.mode = m;
  s.mode_since_s = now_;
  if (acc_.account(n).dead()) {
    die(n);
  } else {
    predict_death(n);
  }
}

void Simulation::refresh_mode(NodeId n) {
  const NodeState& s = node(n);
  RadioMode m = RadioMode::Idle;
  if (s.tx_busy) {
    m = RadioMode::ActiveTx;
  } else if (s.rx_count > 0) {
    m = RadioMode::ActiveRx;
  } else if (s.phase == Phase::Sleep) {
    m = RadioMode::Sleep;
  }
  set_mode(n, m);
}

void Simulation::set_phase(NodeId n, Phase p) {
  NodeState& s = node(n);
  if (!s.alive) return;
  if (s.phase == Phase::Active && p != Phase::Active) {
    s.slot_active_s += now_ - s.active_since_s;
  } else if (s.phase != Phase::Active && p == Phase::Active) {
    s.active_since_s = now_;
  }
  s.phase = p;
  refresh_mode(n);
}

void Simulation::predict_death(NodeId n) {
  NodeState& s = node(n);
  ++s.death_token;
  const double power = cfg_.energy.power(s.mode);
  if (power <= 0.0) return;
  const double t = now_ + acc_.account(n).residual() / power;
  if (t < cfg_.horizon_s) events_.push(t, EventKind::NodeDeath, n, s.death_token);
}

void Simulation::lose(NodeId at, const Packet& p, LossReason reason) {
  emit(trace::Lost{at, p.id, reason});
  meta_.erase(p.id);
}

void Simulation::die(NodeId n) {
  NodeState& s = node(n);
  if (!s.alive) return;
  emit(trace::Death{n, s.mode, now_ - s.mode_since_s});
  if (s.phase == Phase::Active) s.slot_active_s += now_ - s.active_since_s;
  s.alive = false;
  s.mode_since_s = now_;

  std::vector<NodeId> senders;
  for (auto it = transmissions_.begin(); it != transmissions_.end();) {
    const Transmission& t = it->second;
    if (t.from == n || t.to == n) {
      lose(n, t.packet, LossReason::NodeDeath);
      if (t.from == n) {
        NodeState& r = node(t.to);
        r.rx_count -= 1;
        refresh_mode(t.to);
      } else {
        node(t.from).tx_busy = false;
        refresh_mode(t.from);
        senders.push_back(t.from);
      }
      it = transmissions_.erase(it);
    } else {
      ++it;
    }
  }
  s.tx_busy = false;
  s.rx_count = 0;
  for (const Packet& p : s.queue) lose(n, p, LossReason::NodeDeath);
  for (const Packet& p : s.stalled) lose(n, p, LossReason::NodeDeath);
  s.queue.clear();
  s.stalled.clear();
  for (const Packet& p : caches_[n.value].clear()) lose(n, p, LossReason::NodeDeath);
  // Entries waiting for this node have to be re-routed by their holders.
  for (std::size_t h = 0; h < caches_.size(); ++h) {
    if (!nodes_[h].alive) continue;
    for (const CachedDelivery& d : caches_[h].deliver_on_wake(n, now_)) {
      nodes_[h].queue.push_back(d.packet);
      senders.push_back(id(h));
    }
  }

  grid_.remove(n);
  graph_.refresh_node(grid_, n);
  topology_changed();
  reelect_after_death(n);
  for (NodeId h : senders) try_send(h);
}

// Roles are only re-evaluated mid-round when their holder dies.
void Simulation::reelect_after_death(NodeId n) {
  const int ci = cluster_of_.empty() ? -1 : cluster_of_[n.value];
  if (ci < 0) return;
  cluster_of_[n.value] = -1;
  Cluster& cl = clusters_[static_cast<std::size_t>(ci)].cluster;
  std::erase(cl.members, n);
  if (cl.members.empty()) return;
  EnergyMap energies;
  for (NodeId m : cl.members) {
    const NodeState& s = node(m);
    energies[m] = consume(acc_.account(m), s.mode, now_ - s.mode_since_s, cfg_.energy);
  }
  if (cl.ch == n) {
    cl.ch = select_ch(cl.members, energies);
    service_.record_ch(cl.ch);
    emit(trace::RoleAssigned{cl.ch, Role::ClusterHead, round_});
  }
  if (cl.sp == n) {
    std::map<NodeId, SpScore> scores;
    for (const auto& [m, c_l] : candidacy(cl.members, energies)) {
      scores[m] = compute_sp_score(c_l, energies.at(m));
    }
    cl.sp = assign_sp(cl, scores, service_);
    emit(trace::RoleAssigned{cl.sp, Role::SleepProxy, round_});
  }
}

double Simulation::capacity(NodeId a, NodeId b) const {
  auto it = link_overrides_.find(std::minmax(a, b));
  return it == link_overrides_.end() ? cfg_.link_capacity_bps : it->second;
}

double Simulation::capacity_sum(NodeId n) const {
  double sum = 0.0;
  if (!graph_.contains(n)) return sum;
  for (NodeId b : graph_.adjacent(n)) sum += capacity(n, b);
  return sum;
}

void Simulation::observe_capacities() {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].alive) nodes_[i].capacity_sup.observe(now_, capacity_sum(id(i)));
  }
}

void Simulation::observe_path_delay(NodeId n, double d) {
  NodeState& s = node(n);
  if (cfg_.path_delay_window_s > 0.0) {
    s.path_delays.emplace_back(now_, d);
  } else {
    s.path_delay_sup = std::max(s.path_delay_sup.value_or(d), d);
  }
}

std::optional<double> Simulation::path_delay_max(NodeId n) {
  NodeState& s = node(n);
  if (cfg_.path_delay_window_s <= 0.0) return s.path_delay_sup;
  while (!s.path_delays.empty() && s.path_delays.front().first < now_ - cfg_.path_delay_window_s) {
    s.path_delays.pop_front();
  }
  std::optional<double> best;
  for (const auto& [t, d] : s.path_delays) best = std::max(best.value_or(d), d);
  return best;
}

const Router& Simulation::router() {
  if (!router_) router_ = std::make_unique<Router>(graph_);
  return *router_;
}

void Simulation::topology_changed() {
  router_.reset();
  observe_capacities();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    NodeState& s = nodes_[i];
    if (!s.alive || s.stalled.empty()) continue;
    for (const Packet& p : s.stalled) s.queue.push_back(p);
    s.stalled.clear();
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) try_send(id(i));
}

void Simulation::try_send(NodeId h) {
  NodeState& s = node(h);
  while (s.alive && s.phase != Phase::Sleep && !s.tx_busy && !s.queue.empty()) {
    const Packet p = s.queue.front();
    s.queue.pop_front();
    const std::optional<NodeId> next = router().next_hop(h, p.dst);
    if (!next) {
      s.stalled.push_back(p);
      continue;
    }
    if (!awake(*next)) {
      handle_sleeping_hop(h, *next, p);
      continue;
    }
    start_tx(h, *next, p);
  }
}

void Simulation::handle_sleeping_hop(NodeId holder, NodeId target, const Packet& p) {
  if (!cfg_.cache_enabled) {
    lose(holder, p, LossReason::SleepingHop);
    return;
  }
  if (caches_[holder.value].store(p, now_, true, target) == StoreOutcome::Accepted) {
    emit(trace::Cached{holder, target, p.id, false});
    return;
  }
  // Holder is full: hand the packet to the awake neighbour of the target
  // with the most free space.
  std::optional<NodeId> best;
  for (NodeId c : graph_.adjacent(target)) {
    if (c == holder || !awake(c)) continue;
    if (!best || caches_[c.value].free() > caches_[best->value].free()) best = c;
  }
  if (best && caches_[best->value].store(p, now_, true, target) == StoreOutcome::Accepted) {
    emit(trace::Cached{*best, target, p.id, true});
    return;
  }
  lose(holder, p, LossReason::CacheFull);
}

void Simulation::start_tx(NodeId from, NodeId to, const Packet& p) {
  const std::uint64_t tid = next_tx_++;
  transmissions_[tid] = Transmission{p, from, to, now_};
  PacketMeta& m = meta_[p.id];
  m.hosting_s = now_ - m.arrived_at_s;
  NodeState& s = node(from);
  s.tx_busy = true;
  s.tx_id = tid;
  node(to).rx_count += 1;
  refresh_mode(from);
  refresh_mode(to);
  events_.push(now_ + tx_delay(p.size_bits, capacity(from, to)), EventKind::TxComplete, from,
               tid);
}

void Simulation::deliver(const Packet& p) {
  const PacketMeta m = std::move(meta_[p.id]);
  meta_.erase(p.id);
  const PathDelayRecord rec = path_delay(m.hops);
  emit(trace::Delivered{p.dst, p.id, now_ - p.created_at_s, deadline_met(p, now_), rec.total_s});
  for (NodeId v : m.visited) observe_path_delay(v, rec.total_s);
  observe_path_delay(p.dst, rec.total_s);
}

void Simulation::flush(NodeId n) {
  if (!awake(n)) return;
  std::vector<NodeId> holders;
  for (std::size_t h = 0; h < caches_.size(); ++h) {
    if (!awake(id(h)) || caches_[h].empty()) continue;
    if (id(h) == n) {
      for (NodeId t : caches_[h].targets()) {
        if (!awake(t)) continue;
        for (const CachedDelivery& d : caches_[h].deliver_on_wake(t, now_)) {
          nodes_[h].queue.push_back(d.packet);
        }
      }
      holders.push_back(id(h));
    } else if (caches_[h].volume_for(n) > 0.0) {
      for (const CachedDelivery& d : caches_[h].deliver_on_wake(n, now_)) {
        nodes_[h].queue.push_back(d.packet);
      }
      holders.push_back(id(h));
    }
  }
  try_send(n);
  for (NodeId h : holders) try_send(h);
}

std::vector<double> Simulation::pending_bits() {
  std::vector<double> pending(nodes_.size(), 0.0);
  const Router& r = router();
  auto walk = [&](NodeId h, const Packet& p) {
    NodeId cur = h;
    pending[cur.value] += p.size_bits;
    while (cur != p.dst) {
      const std::optional<NodeId> next = r.next_hop(cur, p.dst);
      if (!next || !awake(*next)) break;
      cur = *next;
      pending[cur.value] += p.size_bits;
    }
  };
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const NodeId h = id(i);
    if (!awake(h)) continue;
    const NodeState& s = nodes_[i];
    for (const Packet& p : s.queue) walk(h, p);
    if (s.tx_busy) {
      const Transmission& t = transmissions_.at(s.tx_id);
      pending[t.to.value] += t.packet.size_bits;
      walk(h, t.packet);
    }
    for (const CacheStore::Entry& e : caches_[i].entries()) {
      if (awake(e.target)) walk(h, e.packet);
    }
  }
  return pending;
}

void Simulation::evaluate(NodeId n) {
  NodeState& s = node(n);
  if (!s.alive || s.phase != Phase::Idle) return;
  s.wait_slot = false;
  if (pending_bits()[n.value] > 0.0) {
    set_phase(n, Phase::Active);
    return;
  }
  if (auto d = latest_backward_diff(activity_, n); d && *d > 0.0) {
    s.wait_slot = true;
    return;
  }
  ClusterRuntime& c = clusters_[static_cast<std::size_t>(cluster_of_[n.value])];

  std::optional<double> min_hosting;
  std::vector<double> volumes;
  std::vector<double> hosting;
  for (const CacheStore& cache : caches_) {
    if (auto h = cache.hosting_delay(n, now_)) {
      hosting.push_back(*h);
      volumes.push_back(cache.volume_for(n));
      min_hosting = std::min(min_hosting.value_or(*h), *h);
    }
  }

  double sleep_s = 0.0;
  if (n == c.cluster.sp) {
    if (c.sleep_history.empty()) {
      s.wait_slot = true;
      return;
    }
    sleep_s = sp_sleep(c.sleep_history, c.evals, cfg_.round_s, cfg_.epsilon);
    if (min_hosting) sleep_s = std::min(sleep_s, (1.0 - cfg_.epsilon) * *min_hosting);
  } else {
    SleepInputs in;
    for (NodeId b : graph_.adjacent(n)) in.capacities_bps.push_back(capacity(n, b));
    in.volumes_bits = volumes;
    in.sup_capacity_bps = s.capacity_sup.max(now_);
    in.hops = c.hops;
    in.path_delay_s = c.max_dp.value_or(cfg_.round_s);
    in.round_s = cfg_.round_s;
    in.cache_delays_s = hosting;
    in.epsilon = cfg_.epsilon;
    in.capacity_window_s = cfg_.capacity_window_s;
    try {
      sleep_s = compute_sleep(in);
    } catch (const NoCapacity&) {
      s.wait_slot = true;
      return;
    }
    c.sleep_history.push_back(sleep_s);
    c.evals += 1;
  }
  // A sleep too short to pay for itself, or one the round boundary would cut
  // to nothing: stay up until the next slot.
  const double round_left = (round_ + 1) * cfg_.round_s - now_;
  if (std::min(sleep_s, round_left) < cfg_.min_sleep_s) {
    s.wait_slot = true;
    return;
  }
  go_sleep(n, sleep_s, min_hosting);
}

void Simulation::go_sleep(NodeId n, double computed_s, std::optional<double> min_hosting) {
  NodeState& s = node(n);
  const double round_end = (round_ + 1) * cfg_.round_s;
  const double actual_s = std::min(computed_s, round_end - now_);
  emit(trace::SleepAssigned{n, computed_s, actual_s, cfg_.round_s, min_hosting});
  set_phase(n, Phase::Sleep);
  if (!s.alive) return;
  const double until = actual_s < computed_s ? round_end : now_ + actual_s;
  events_.push(until, EventKind::SleepExpiry, n, ++s.phase_token);
}

void Simulation::wake(NodeId n) {
  NodeState& s = node(n);
  set_phase(n, Phase::Idle);
  if (!s.alive) return;
  const ClusterRuntime& c = clusters_[static_cast<std::size_t>(cluster_of_[n.value])];
  events_.push(now_ + c.t_idle, EventKind::IdleExpiry, n, ++s.phase_token);
  events_.push(now_, EventKind::CacheDelivery, n);
}

void Simulation::drain(NodeId n) {
  NodeState& s = node(n);
  set_phase(n, Phase::Idle);
  if (!s.alive) return;
  for (NodeId b : graph_.adjacent(n)) {
    if (pairwise_idle_decision(activity_, n, b, 0.0, graph_) == IdleDecision::ToIdle) {
      ++s.phase_token;
      evaluate(n);
      return;
    }
  }
  const ClusterRuntime& c = clusters_[static_cast<std::size_t>(cluster_of_[n.value])];
  events_.push(now_ + c.t_idle, EventKind::IdleExpiry, n, ++s.phase_token);
}

void Simulation::apply_directive(NodeId n) {
  NodeState& s = node(n);
  DispatchContext ctx{round_ * cfg_.round_s, cfg_.round_s, std::nullopt};
  const PhaseDirective d = dispatch_scheme(cfg_.scheme, now_, ctx);
  s.sleep_deferred = false;
  set_phase(n, d.phase);
  if (!s.alive || std::isinf(d.until_s)) return;
  const EventKind k = d.phase == Phase::Sleep ? EventKind::SleepExpiry : EventKind::IdleExpiry;
  events_.push(d.until_s, k, n, ++s.phase_token);
  if (d.phase != Phase::Sleep) events_.push(now_, EventKind::CacheDelivery, n);
}

void Simulation::baseline_listen_end(NodeId n) {
  NodeState& s = node(n);
  const bool busy = s.tx_busy || s.rx_count > 0;
  const bool adaptive =
      cfg_.scheme.kind == SchemeKind::CoordinatedDutyCycle && !s.queue.empty();
  if (busy || adaptive) {
    s.sleep_deferred = true;
    return;
  }
  apply_directive(n);
}

void Simulation::after_event() {
  if (traffic_aware()) {
    bool any_active = false;
    for (const NodeState& s : nodes_) any_active |= s.alive && s.phase == Phase::Active;
    if (!any_active) return;
    const std::vector<double> pending = pending_bits();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].alive && nodes_[i].phase == Phase::Active && pending[i] <= 0.0) {
        drain(id(i));
      }
    }
    return;
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].alive && nodes_[i].sleep_deferred) baseline_listen_end(id(i));
  }
}

void Simulation::on_round_setup(const Event& e) {
  round_ = static_cast<int>(e.arg);
  int alive = 0;
  for (const NodeState& s : nodes_) alive += s.alive ? 1 : 0;

  clusters_.clear();
  cluster_of_.assign(nodes_.size(), -1);
  if (traffic_aware() && alive > 0) {
    EnergyMap energies;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const NodeState& s = nodes_[i];
      if (!s.alive) continue;
      energies[id(i)] = consume(acc_.account(id(i)), s.mode, now_ - s.mode_since_s, cfg_.energy);
    }
    const auto sets = form_clusters(graph_, grid_, cfg_.cluster);
    for (Cluster& cl : elect_roles(sets, energies, service_, round_, cfg_.round_s)) {
      ClusterRuntime rt;
      rt.cluster = std::move(cl);
      for (NodeId m : rt.cluster.members) {
        const auto dist = hop_distances(graph_, m);
        for (NodeId o : rt.cluster.members) {
          if (auto it = dist.find(o); it != dist.end()) rt.hops = std::max(rt.hops, it->second);
        }
        if (auto d = path_delay_max(m)) rt.max_dp = std::max(rt.max_dp.value_or(*d), *d);
      }
      rt.t_idle = compute_idle(cfg_.round_s, rt.max_dp.value_or(0.0), rt.hops);
      for (NodeId m : rt.cluster.members) cluster_of_[m.value] = static_cast<int>(clusters_.size());
      clusters_.push_back(std::move(rt));
    }
  }
  emit(trace::RoundStarted{round_, static_cast<int>(clusters_.size()), alive});
  for (const ClusterRuntime& c : clusters_) {
    emit(trace::RoleAssigned{c.cluster.ch, Role::ClusterHead, round_});
    emit(trace::RoleAssigned{c.cluster.sp, Role::SleepProxy, round_});
  }

  if (traffic_aware()) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      NodeState& s = nodes_[i];
      if (!s.alive || s.phase != Phase::Idle) continue;
      s.wait_slot = false;
      events_.push(now_ + clusters_[static_cast<std::size_t>(cluster_of_[i])].t_idle,
                   EventKind::IdleExpiry, id(i), ++s.phase_token);
    }
  }
  const double next = (round_ + 1) * cfg_.round_s;
  if (next < cfg_.horizon_s) {
    events_.push(next, EventKind::RoundSetup, NodeId(0), static_cast<std::uint64_t>(round_ + 1));
  }
}

void Simulation::on_slot_boundary(const Event& e) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    NodeState& s = nodes_[i];
    if (!s.alive) continue;
    if (s.phase == Phase::Active) {
      s.slot_active_s += now_ - s.active_since_s;
      s.active_since_s = now_;
    }
    activity_.record(id(i), std::min(s.slot_active_s, activity_.slot_width()));
    s.slot_active_s = 0.0;
  }
  for (std::size_t h = 0; h < caches_.size(); ++h) {
    for (const Packet& p : caches_[h].evict_expired(now_)) {
      lose(id(h), p,
           p.cls == PacketClass::DelaySensitive ? LossReason::Deadline : LossReason::Overflow);
    }
  }
  if (traffic_aware()) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].alive && nodes_[i].wait_slot) evaluate(id(i));
    }
  }
  const std::uint64_t next_index = e.arg + 1;
  const double next = static_cast<double>(next_index) * cfg_.round_s / cfg_.slots;
  if (next < cfg_.horizon_s) events_.push(next, EventKind::SlotBoundary, NodeId(0), next_index);
}

void Simulation::on_mobility() {
  bool changed = false;
  std::vector<NodeId> woken;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].alive) continue;
    if (move_step(grid_, id(i), mobility_rng_, cfg_.p_move).moved) {
      graph_.refresh_node(grid_, id(i));
      changed = true;
      if (traffic_aware() && nodes_[i].phase == Phase::Sleep) woken.push_back(id(i));
    }
  }
  for (NodeId n : woken) wake(n);
  if (changed) topology_changed();
  const double next = now_ + cfg_.mobility_step_s;
  if (next < cfg_.horizon_s) events_.push(next, EventKind::MobilityStep);
}

void Simulation::on_arrival(const Event& e) {
  const Packet& p = packets_[e.arg];
  const NodeState& dst = node(p.dst);
  emit(trace::Generated{p.src, p.dst, p.id, p.size_bits, p.cls,
                        dst.alive && dst.phase == Phase::Sleep});
  NodeState& s = node(p.src);
  if (!s.alive) {
    emit(trace::Lost{p.src, p.id, LossReason::NodeDeath});
    return;
  }
  meta_[p.id].arrived_at_s = now_;
  s.queue.push_back(p);
  try_send(p.src);
}

void Simulation::on_tx_complete(const Event& e) {
  auto it = transmissions_.find(e.arg);
  if (it == transmissions_.end()) return;
  const Transmission t = it->second;
  transmissions_.erase(it);
  NodeState& from = node(t.from);
  NodeState& to = node(t.to);
  from.tx_busy = false;
  to.rx_count -= 1;
  PacketMeta& m = meta_[t.packet.id];
  m.hops.push_back({m.hosting_s, now_ - t.started_at_s});
  m.visited.push_back(t.from);
  refresh_mode(t.from);
  refresh_mode(t.to);
  if (to.alive) {
    if (t.to == t.packet.dst) {
      deliver(t.packet);
    } else {
      m.arrived_at_s = now_;
      to.queue.push_back(t.packet);
      try_send(t.to);
    }
  }
  try_send(t.from);
}

SimulationResult Simulation::run() {
  const std::size_t n = nodes_.size();
  events_.push(0.0, EventKind::RoundSetup, NodeId(0), 0);
  if (cfg_.horizon_s > 0.0) {
    const double slot = cfg_.round_s / cfg_.slots;
    if (slot < cfg_.horizon_s) events_.push(slot, EventKind::SlotBoundary, NodeId(0), 1);
    if (cfg_.p_move > 0.0 && cfg_.mobility_step_s < cfg_.horizon_s) {
      events_.push(cfg_.mobility_step_s, EventKind::MobilityStep);
    }
    for (std::size_t i = 0; i < packets_.size(); ++i) {
      events_.push(packets_[i].created_at_s, EventKind::PacketArrival, packets_[i].src, i);
    }
    observe_capacities();
    for (std::size_t i = 0; i < n; ++i) {
      predict_death(id(i));
      if (!traffic_aware()) apply_directive(id(i));
    }
  }

  std::uint64_t processed = 0;
  while (!events_.empty() && events_.top().time_s < cfg_.horizon_s) {
    if (options_.max_events > 0 && processed >= options_.max_events) break;
    const Event e = events_.pop();
    now_ = e.time_s;
    ++processed;
    switch (e.kind) {
      case EventKind::RoundSetup:
        on_round_setup(e);
        break;
      case EventKind::SlotBoundary:
        on_slot_boundary(e);
        break;
      case EventKind::MobilityStep:
        on_mobility();
        break;
      case EventKind::PacketArrival:
        on_arrival(e);
        break;
      case EventKind::TxComplete:
        on_tx_complete(e);
        break;
      case EventKind::NodeDeath:
        if (node(e.node).alive && e.arg == node(e.node).death_token) die(e.node);
        break;
      case EventKind::CacheDelivery:
        flush(e.node);
        break;
      case EventKind::SleepExpiry: {
        NodeState& s = node(e.node);
        if (!s.alive || e.arg != s.phase_token || s.phase != Phase::Sleep) break;
        if (traffic_aware()) {
          wake(e.node);
        } else {
          apply_directive(e.node);
        }
        break;
      }
      case EventKind::IdleExpiry: {
        NodeState& s = node(e.node);
        if (!s.alive || e.arg != s.phase_token) break;
        if (traffic_aware()) {
          evaluate(e.node);
        } else {
          baseline_listen_end(e.node);
        }
        break;
      }
    }
    after_event();
  }

  const bool truncated = options_.max_events > 0 && !events_.empty() &&
                         events_.top().time_s < cfg_.horizon_s;
  now_ = truncated ? now_ : cfg_.horizon_s;
  if (truncated) acc_.set_horizon(now_);
  for (std::size_t i = 0; i < n; ++i) {
    NodeState& s = nodes_[i];
    if (!s.alive) continue;
    emit(trace::HorizonEnd{id(i), s.mode, now_ - s.mode_since_s});
    s.mode_since_s = now_;
  }
  SimulationResult out;
  out.report = acc_.finalize();
  out.trace = std::move(trace_);
  out.events_processed = processed;
  out.end_time_s = now_;
  return out;
}

}  // namespace

SimulationResult simulate(const ScenarioConfig& config, std::uint64_t seed,
                          const RunOptions& options) {
  if (auto errors = config.validate(); !errors.empty()) throw ConfigError(std::move(errors));
  Simulation sim(config, seed, options);
  return sim.run();
}

MetricsReport run(const ScenarioConfig& config, std::uint64_t seed) {
  return simulate(config, seed).report;
}

}  // namespace ecsim
