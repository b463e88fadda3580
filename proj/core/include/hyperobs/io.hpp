#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "hyperobs/design.hpp"
#include "hyperobs/system.hpp"

namespace hyperobs {

// One parsed system file: the model plus the optional analysis inputs the
// format carries. Weights are exact "p/q" strings; with normalize_weights the
// loader divides dynamics/input weights by (k-1)! and output/direct weights
// by k! before storing, so the in-memory tensors are always literal.
struct SystemFile {
  HypergraphSystem system;
  bool normalize_weights = false;
  std::optional<std::vector<Rat>> sigma;
  std::optional<DesignConfig> design;
};

SystemFile parse_system_file(const std::string& path);
SystemFile parse_system_json(const nlohmann::json& doc, const std::string& origin);

// Writes the stored (post-normalization) tensors back out, weights as exact
// strings; parse(serialize(s)) reproduces s bit-exactly.
nlohmann::ordered_json system_to_json(const SystemFile& file);

}  // namespace hyperobs
