#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "actctx/sim/episode.hpp"

namespace actctx::test {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(ACTCTX_DATA_DIR) / rel;
}

inline sim::CatalogPtr kitchen_catalog() {
  static const sim::CatalogPtr cat = sim::load_catalog(data_path("kitchen_vocab.json"));
  return cat;
}

inline std::vector<sim::Layout> kitchen_layouts() {
  std::vector<sim::Layout> out;
  for (int i = 1; i <= 8; ++i) {
    out.push_back(sim::load_layout(data_path("layouts/kitchen_0" + std::to_string(i) + ".json"),
                                   kitchen_catalog()));
  }
  return out;
}

}  // namespace actctx::test
