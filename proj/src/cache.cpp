#include "ecsim/cache.hpp"

#include <algorithm>

namespace ecsim {

CacheStore::CacheStore(NodeId holder, double capacity_bits)
    : holder_(holder), capacity_bits_(capacity_bits) {
  if (capacity_bits < 0.0) throw InvalidInput("cache capacity must be >= 0");
}

bool CacheStore::contains(std::uint64_t packet_id) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const Entry& e) { return e.packet.id == packet_id; });
}

StoreOutcome CacheStore::store(const Packet& packet, double now_s, bool holder_active,
                               std::optional<NodeId> target) {
  if (!holder_active) return StoreOutcome::RejectedUnavailable;
  if (contains(packet.id)) return StoreOutcome::AlreadyStored;
  if (used_bits_ + packet.size_bits > capacity_bits_) return StoreOutcome::RejectedFull;
  const NodeId t = target.value_or(packet.dst);
  entries_.push_back({packet, t, now_s});
  used_bits_ += packet.size_bits;
  volumes_[t] += packet.size_bits;
  return StoreOutcome::Accepted;
}

void CacheStore::erase_at(std::size_t i) {
  const NodeId target = entries_[i].target;
  used_bits_ -= entries_[i].packet.size_bits;
  volumes_[target] -= entries_[i].packet.size_bits;
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
  if (recomputed_volume(target) == 0.0) volumes_.erase(target);
  if (entries_.empty()) used_bits_ = 0.0;
}

std::vector<CachedDelivery> CacheStore::deliver_on_wake(NodeId woken, double now_s) {
  std::vector<CachedDelivery> out;
  for (const Entry& e : entries_) {
    if (e.target == woken) out.push_back({e.packet, e.stored_at_s, now_s - e.stored_at_s});
  }
  if (out.empty()) return out;
  std::erase_if(entries_, [&](const Entry& e) {
    if (e.target != woken) return false;
    used_bits_ -= e.packet.size_bits;
    return true;
  });
  volumes_.erase(woken);
  if (entries_.empty()) used_bits_ = 0.0;
  return out;
}

std::vector<Packet> CacheStore::evict_expired(double now_s) {
  std::vector<Packet> dropped;
  for (std::size_t i = 0; i < entries_.size();) {
    const Packet& p = entries_[i].packet;
    if (p.cls == PacketClass::DelaySensitive && p.deadline_s < now_s) {
      dropped.push_back(p);
      erase_at(i);
    } else {
      ++i;
    }
  }
  for (std::size_t i = 0; used_bits_ > capacity_bits_ && i < entries_.size();) {
    if (entries_[i].packet.cls == PacketClass::Elastic) {
      dropped.push_back(entries_[i].packet);
      erase_at(i);
    } else {
      ++i;
    }
  }
  return dropped;
}

std::vector<Packet> CacheStore::clear() {
  std::vector<Packet> out;
  for (const Entry& e : entries_) out.push_back(e.packet);
  entries_.clear();
  volumes_.clear();
  used_bits_ = 0.0;
  return out;
}

double CacheStore::volume_for(NodeId target) const {
  auto it = volumes_.find(target);
  return it == volumes_.end() ? 0.0 : it->second;
}

double CacheStore::recomputed_volume(NodeId target) const {
  double v = 0.0;
  for (const Entry& e : entries_) {
    if (e.target == target) v += e.packet.size_bits;
  }
  return v;
}

std::optional<double> CacheStore::hosting_delay(NodeId target, double now_s) const {
  for (const Entry& e : entries_) {
    if (e.target == target) return now_s - e.stored_at_s;
  }
  return std::nullopt;
}

std::vector<NodeId> CacheStore::targets() const {
  std::vector<NodeId> out;
  for (const auto& [t, v] : volumes_) out.push_back(t);
  return out;
}

}  // namespace ecsim
