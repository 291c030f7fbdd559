#pragma once

#include <map>
#include <span>
#include <vector>

#include "actctx/reward/event.hpp"

namespace actctx {

inline constexpr double kDefaultEpsilon = 0.5;  // meters

struct MemoryEntry {
  InstanceId instance;
  ClassId cls;
  Vec2 position;
  bool operator==(const MemoryEntry&) const = default;
};

/// A world instance with a position, as seen by the memory update.
struct PlacedAnchor {
  InstanceId instance;
  Vec2 position;
};

/// Placed-object memory: for each anchor instance, the objects the agent put
/// down within `epsilon` of it, with their drop positions.
class AcoMemory {
 public:
  explicit AcoMemory(double epsilon = kDefaultEpsilon);

  double epsilon() const { return epsilon_; }
  /// Entries stored under `anchor`; empty when none.
  const std::vector<MemoryEntry>& at(InstanceId anchor) const;
  const std::map<InstanceId, std::vector<MemoryEntry>>& entries() const { return entries_; }
  bool contains(InstanceId instance) const;
  std::size_t total_entries() const;
  void clear() { entries_.clear(); }

  /// Applies one successful put or take. Put of o at p stores (o, p) under
  /// every other anchor closer than epsilon. Take of o drops o from every
  /// anchor and clears o's own entries; taking an object the agent never put
  /// down leaves the other anchors untouched. Other event kinds are ignored.
  void update(const InteractionEvent& event, std::span<const PlacedAnchor> anchors);

  bool operator==(const AcoMemory&) const = default;

 private:
  double epsilon_;
  std::map<InstanceId, std::vector<MemoryEntry>> entries_;
};

inline AcoMemory update_memory(AcoMemory memory, const InteractionEvent& event,
                               std::span<const PlacedAnchor> anchors) {
  memory.update(event, anchors);
  return memory;
}

}  // namespace actctx
