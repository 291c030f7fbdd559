#include "actctx/prior/vocabulary.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace actctx {

Vocabulary::Vocabulary(std::vector<std::string> names, std::vector<bool> movable)
    : names_(std::move(names)), movable_(std::move(movable)) {
  if (names_.size() != movable_.size()) {
    throw ValidationError("vocabulary: names and movable flags differ in length");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw ValidationError("vocabulary: empty class name");
    if (names_[i] == kNullName) {
      throw ValidationError("vocabulary: 'null' is reserved for the null token");
    }
    if (!index_.emplace(names_[i], static_cast<ClassId>(i)).second) {
      throw ValidationError("vocabulary: duplicate class '" + names_[i] + "'");
    }
  }
}

const std::string& Vocabulary::name(ClassId id) const {
  static const std::string null_name(kNullName);
  if (id == null_id()) return null_name;
  return names_.at(static_cast<std::size_t>(id));
}

bool Vocabulary::movable(ClassId id) const {
  if (id == null_id()) return true;
  return movable_.at(static_cast<std::size_t>(id));
}

std::optional<ClassId> Vocabulary::find(std::string_view name) const {
  if (name == kNullName) return null_id();
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ClassId Vocabulary::at(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw ValidationError("unknown object class '" + std::string(name) + "'");
}

int Vocabulary::movable_count() const {
  return static_cast<int>(std::count(movable_.begin(), movable_.end(), true));
}

void Vocabulary::require_environment_shape() const {
  const int moving = movable_count();
  if (moving == 0 || moving == size()) {
    throw ValidationError("environment vocabulary needs at least one movable and one fixed class");
  }
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::vector<std::string> names;
  std::vector<bool> movable;
  try {
    for (const auto& entry : doc.at("classes")) {
      names.push_back(entry.at("name").get<std::string>());
      movable.push_back(entry.value("movable", false));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return Vocabulary(std::move(names), std::move(movable));
}

}  // namespace actctx
