#include "actctx/sim/catalog.hpp"

#include <array>
#include <fstream>
#include <utility>

#include <json.hpp>

namespace actctx::sim {

namespace {

constexpr std::array<std::pair<Affordance, const char*>, 12> kNames{{
    {Affordance::movable, "movable"},
    {Affordance::receptacle, "receptacle"},
    {Affordance::openable, "openable"},
    {Affordance::toggleable, "toggleable"},
    {Affordance::sliceable, "sliceable"},
    {Affordance::storable, "storable"},
    {Affordance::heatable, "heatable"},
    {Affordance::coolable, "coolable"},
    {Affordance::cleanable, "cleanable"},
    {Affordance::cookable, "cookable"},
    {Affordance::trashable, "trashable"},
    {Affordance::cutter, "cutter"},
}};

}  // namespace

std::optional<Affordance> affordance_from_name(const std::string& name) {
  for (const auto& [a, n] : kNames) {
    if (name == n) return a;
  }
  return std::nullopt;
}

std::string affordance_name(Affordance a) {
  for (const auto& [candidate, n] : kNames) {
    if (candidate == a) return n;
  }
  return "?";
}

KitchenCatalog::KitchenCatalog(Vocabulary vocab, std::vector<ClassInfo> info)
    : vocab_(std::move(vocab)), info_(std::move(info)) {
  if (static_cast<int>(info_.size()) != vocab_.size()) {
    throw ValidationError("catalog: affordance list does not match vocabulary");
  }
  for (ClassId c = 0; c < vocab_.size(); ++c) {
    if (info_[c].affordances.has(Affordance::movable) != vocab_.movable(c)) {
      throw ValidationError("catalog: movable flag disagrees for " + vocab_.name(c));
    }
    if (info_[c].affordances.has(Affordance::receptacle)) receptacles_.push_back(c);
  }
}

std::optional<ClassId> KitchenCatalog::find_glyph(char glyph) const {
  for (ClassId c = 0; c < vocab_.size(); ++c) {
    if (info_[c].glyph == glyph) return c;
  }
  return std::nullopt;
}

CatalogPtr load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open catalog " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
    std::vector<std::string> names;
    std::vector<bool> movable;
    std::vector<ClassInfo> info;
    for (const auto& entry : doc.at("classes")) {
      ClassInfo ci;
      names.push_back(entry.at("name").get<std::string>());
      const bool is_movable = entry.value("movable", false);
      movable.push_back(is_movable);
      if (is_movable) ci.affordances.add(Affordance::movable);
      for (const auto& a : entry.value("affordances", nlohmann::json::array())) {
        auto parsed = affordance_from_name(a.get<std::string>());
        if (!parsed) throw ParseError("unknown affordance '" + a.get<std::string>() + "'");
        ci.affordances.add(*parsed);
      }
      if (entry.contains("accepts")) {
        auto parsed = affordance_from_name(entry.at("accepts").get<std::string>());
        if (!parsed) throw ParseError("unknown accepts affordance");
        ci.accepts = *parsed;
      }
      if (entry.contains("glyph")) {
        const auto g = entry.at("glyph").get<std::string>();
        if (g.size() != 1) throw ParseError("glyph must be one character");
        ci.glyph = g[0];
      }
      info.push_back(ci);
    }
    return std::make_shared<const KitchenCatalog>(Vocabulary(std::move(names), std::move(movable)),
                                                  std::move(info));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace actctx::sim
