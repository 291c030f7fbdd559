#include "actctx/reward/aco_memory.hpp"

#include <algorithm>

namespace actctx {

AcoMemory::AcoMemory(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0)) throw ValidationError("memory radius must be positive");
}

const std::vector<MemoryEntry>& AcoMemory::at(InstanceId anchor) const {
  static const std::vector<MemoryEntry> kEmpty;
  const auto it = entries_.find(anchor);
  return it == entries_.end() ? kEmpty : it->second;
}

bool AcoMemory::contains(InstanceId instance) const {
  for (const auto& [anchor, list] : entries_) {
    for (const auto& e : list) {
      if (e.instance == instance) return true;
    }
  }
  return false;
}

std::size_t AcoMemory::total_entries() const {
  std::size_t n = 0;
  for (const auto& [anchor, list] : entries_) n += list.size();
  return n;
}

void AcoMemory::update(const InteractionEvent& event, std::span<const PlacedAnchor> anchors) {
  if (!event.success || !event.subject_instance || !event.subject_class) return;
  const InstanceId subject = *event.subject_instance;
  if (event.kind == EventKind::take) {
    for (auto it = entries_.begin(); it != entries_.end();) {
      std::erase_if(it->second, [&](const MemoryEntry& e) { return e.instance == subject; });
      it = it->second.empty() ? entries_.erase(it) : std::next(it);
    }
    entries_.erase(subject);
  } else if (event.kind == EventKind::put) {
    for (const auto& a : anchors) {
      if (a.instance == subject) continue;
      if ((a.position - event.position).norm() < epsilon_) {
        entries_[a.instance].push_back({subject, *event.subject_class, event.position});
      }
    }
  }
}

}  // namespace actctx
