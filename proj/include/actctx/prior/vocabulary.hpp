#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "actctx/core.hpp"

namespace actctx {

/// Ordered set of object classes with a movability flag per class, plus a
/// reserved null token standing for "nothing held".
class Vocabulary {
 public:
  static constexpr std::string_view kNullName = "null";

  Vocabulary() = default;
  Vocabulary(std::vector<std::string> names, std::vector<bool> movable);

  /// Number of real classes (the null token is not counted).
  int size() const { return static_cast<int>(names_.size()); }
  ClassId null_id() const { return size(); }
  bool is_null(ClassId id) const { return id == null_id(); }

  const std::string& name(ClassId id) const;
  bool movable(ClassId id) const;
  std::optional<ClassId> find(std::string_view name) const;
  /// Throws ValidationError naming the class when absent.
  ClassId at(std::string_view name) const;

  const std::vector<std::string>& names() const { return names_; }
  int movable_count() const;

  /// Environment vocabularies need at least one movable and one fixed class.
  void require_environment_shape() const;

  bool operator==(const Vocabulary& other) const {
    return names_ == other.names_ && movable_ == other.movable_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<bool> movable_;
  std::unordered_map<std::string, ClassId> index_;
};

/// Reads `{"classes": [{"name": ..., "movable": bool, ...}, ...]}`. Extra
/// keys per class are ignored so the kitchen catalog file doubles as a
/// vocabulary file.
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace actctx
