#include "actctx/sim/action.hpp"

#include <algorithm>
#include <array>

namespace actctx::sim {

namespace {
constexpr std::array<const char*, 10> kVerbNames{
    "move_forward", "turn_left", "turn_right", "take",       "put",
    "open",         "close",     "toggle_on",  "toggle_off", "slice"};
}

std::string verb_name(Verb v) { return kVerbNames[static_cast<std::size_t>(v)]; }

std::optional<Verb> verb_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kVerbNames.size(); ++i) {
    if (name == kVerbNames[i]) return static_cast<Verb>(i);
  }
  return std::nullopt;
}

ActionSpace::ActionSpace(const KitchenCatalog& catalog) {
  actions_ = {{Verb::move_forward, -1}, {Verb::turn_left, -1}, {Verb::turn_right, -1}};
  const auto add_for = [&](Verb verb, Affordance a) {
    for (ClassId c = 0; c < catalog.size(); ++c) {
      if (catalog.has(c, a)) actions_.push_back({verb, c});
    }
  };
  add_for(Verb::take, Affordance::movable);
  add_for(Verb::put, Affordance::receptacle);
  add_for(Verb::open, Affordance::openable);
  add_for(Verb::close, Affordance::openable);
  add_for(Verb::toggle_on, Affordance::toggleable);
  add_for(Verb::toggle_off, Affordance::toggleable);
  add_for(Verb::slice, Affordance::sliceable);
}

std::optional<int> ActionSpace::index_of(const Action& action) const {
  auto it = std::find(actions_.begin(), actions_.end(), action);
  if (it == actions_.end()) return std::nullopt;
  return static_cast<int>(it - actions_.begin());
}

int ActionSpace::require(Verb verb, ClassId target) const {
  if (auto i = index_of({verb, target})) return *i;
  throw ValidationError("action " + verb_name(verb) + " on class " + std::to_string(target) +
                        " is not in the action space");
}

std::string ActionSpace::name(int index, const Vocabulary& vocab) const {
  const Action& a = at(index);
  if (is_navigation(a.verb)) return verb_name(a.verb);
  return verb_name(a.verb) + ":" + vocab.name(a.target);
}

}  // namespace actctx::sim
