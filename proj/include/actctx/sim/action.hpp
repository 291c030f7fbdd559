#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "actctx/sim/catalog.hpp"

namespace actctx::sim {

enum class Verb : std::uint8_t {
  move_forward,
  turn_left,
  turn_right,
  take,
  put,
  open,
  close,
  toggle_on,
  toggle_off,
  slice,
};

constexpr bool is_navigation(Verb v) {
  return v == Verb::move_forward || v == Verb::turn_left || v == Verb::turn_right;
}

std::string verb_name(Verb v);
std::optional<Verb> verb_from_name(const std::string& name);

/// A navigation verb (target < 0) or an interaction verb on an object class.
struct Action {
  Verb verb = Verb::move_forward;
  ClassId target = -1;
  bool operator==(const Action&) const = default;
};

/// Navigation actions followed by every valid (verb, class) pair of the
/// catalog: take movables, put into receptacles, open/close openables,
/// toggle toggleables, slice sliceables.
class ActionSpace {
 public:
  explicit ActionSpace(const KitchenCatalog& catalog);

  int size() const { return static_cast<int>(actions_.size()); }
  int navigation_size() const { return 3; }
  const Action& at(int index) const { return actions_.at(static_cast<std::size_t>(index)); }
  std::optional<int> index_of(const Action& action) const;
  /// Throws ValidationError for pairs outside the space.
  int require(Verb verb, ClassId target = -1) const;
  std::string name(int index, const Vocabulary& vocab) const;

 private:
  std::vector<Action> actions_;
};

}  // namespace actctx::sim
