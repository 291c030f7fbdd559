#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "actctx/prior/vocabulary.hpp"

namespace actctx::sim {

enum class Affordance : std::uint32_t {
  movable = 1u << 0,
  receptacle = 1u << 1,
  openable = 1u << 2,
  toggleable = 1u << 3,
  sliceable = 1u << 4,
  storable = 1u << 5,
  heatable = 1u << 6,
  coolable = 1u << 7,
  cleanable = 1u << 8,
  cookable = 1u << 9,
  trashable = 1u << 10,
  /// Holding one enables slicing.
  cutter = 1u << 11,
};

class AffordanceSet {
 public:
  constexpr AffordanceSet() = default;
  constexpr AffordanceSet(Affordance a) : bits_(static_cast<std::uint32_t>(a)) {}

  constexpr bool has(Affordance a) const { return (bits_ & static_cast<std::uint32_t>(a)) != 0; }
  constexpr void add(Affordance a) { bits_ |= static_cast<std::uint32_t>(a); }
  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool operator==(const AffordanceSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

std::optional<Affordance> affordance_from_name(const std::string& name);
std::string affordance_name(Affordance a);

struct ClassInfo {
  AffordanceSet affordances;
  /// When set, a receptacle only accepts objects carrying this affordance.
  std::optional<Affordance> accepts;
  /// Glyph used in layout grids for fixed classes.
  std::optional<char> glyph;
};

/// Environment vocabulary plus per-class affordances.
class KitchenCatalog {
 public:
  KitchenCatalog(Vocabulary vocab, std::vector<ClassInfo> info);

  const Vocabulary& vocabulary() const { return vocab_; }
  int size() const { return vocab_.size(); }
  const ClassInfo& info(ClassId c) const { return info_.at(static_cast<std::size_t>(c)); }
  bool has(ClassId c, Affordance a) const { return info(c).affordances.has(a); }
  ClassId at(std::string_view name) const { return vocab_.at(name); }
  std::optional<ClassId> find_glyph(char glyph) const;

  /// Receptacle classes in vocabulary order; used for container features.
  const std::vector<ClassId>& receptacles() const { return receptacles_; }

 private:
  Vocabulary vocab_;
  std::vector<ClassInfo> info_;
  std::vector<ClassId> receptacles_;
};

using CatalogPtr = std::shared_ptr<const KitchenCatalog>;

/// {"classes": [{"name", "movable", "affordances": [...], "accepts", "glyph"}]}
CatalogPtr load_catalog(const std::filesystem::path& path);

}  // namespace actctx::sim
