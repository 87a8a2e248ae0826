#pragma once

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "ecsim/core.hpp"
#include "ecsim/traffic.hpp"

namespace ecsim {

enum class StoreOutcome { Accepted, AlreadyStored, RejectedFull, RejectedUnavailable };

/// A packet handed back by the cache together with how long it was held.
struct CachedDelivery {
  Packet packet;
  double stored_at_s = 0.0;
  double hosted_s = 0.0;
};

/// Packets held by one node on behalf of sleeping nodes. Each entry waits
/// for a target: the sleeping node it has to reach next (the destination
/// itself on the last hop).
class CacheStore {
public:
  struct Entry {
    Packet packet;
    NodeId target;
    double stored_at_s = 0.0;
  };

  CacheStore(NodeId holder, double capacity_bits);

  /// Stores `packet` for `target` (defaults to packet.dst). A packet id
  /// already held is a no-op.
  StoreOutcome store(const Packet& packet, double now_s, bool holder_active = true,
                     std::optional<NodeId> target = std::nullopt);

  /// Removes and returns every entry waiting for `woken`, oldest first.
  std::vector<CachedDelivery> deliver_on_wake(NodeId woken, double now_s);

  /// Drops delay-sensitive entries past their deadline, then the oldest
  /// elastic entries while over capacity.
  std::vector<Packet> evict_expired(double now_s);

  /// Removes everything (holder died).
  std::vector<Packet> clear();

  NodeId holder() const { return holder_; }
  double capacity() const { return capacity_bits_; }
  void set_capacity(double bits) { capacity_bits_ = bits; }
  double used() const { return used_bits_; }
  double free() const { return capacity_bits_ - used_bits_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  bool contains(std::uint64_t packet_id) const;

  /// V for `target`, maintained incrementally.
  double volume_for(NodeId target) const;
  /// V for `target` summed from scratch over the entries.
  double recomputed_volume(NodeId target) const;
  /// Hosting delay of the oldest entry waiting for `target`.
  std::optional<double> hosting_delay(NodeId target, double now_s) const;
  /// Targets that currently have entries, in id order.
  std::vector<NodeId> targets() const;
  const std::deque<Entry>& entries() const { return entries_; }

private:
  void erase_at(std::size_t i);

  NodeId holder_;
  double capacity_bits_;
  double used_bits_ = 0.0;
  std::deque<Entry> entries_;
  std::map<NodeId, double> volumes_;
};

}  // namespace ecsim
