#pragma once

#include <json.hpp>

namespace rdmeta {

inline constexpr const char* kVersion = "0.1.0";

inline nlohmann::json module_versions() {
  return {{"rdmeta", kVersion},   {"model", "1"},          {"reaction", "1"},
          {"pde", "1"},           {"elliptic", "1"},       {"ldp", "1"},
          {"quasipotential", "1"}, {"fwgraph", "1"},        {"driver", "1"}};
}

}  // namespace rdmeta
