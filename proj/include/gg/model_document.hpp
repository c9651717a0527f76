#pragma once

#include <string>
#include <string_view>

#include "gg/induction.hpp"

namespace gg {

inline constexpr int kModelDocumentVersion = 1;

/// Canonical model document: compact JSON, keys sorted, shortest round-trip
/// numbers, and a SHA-256 `checksum` over the document without that field.
/// Fields: version, algorithm, schema, features, tree, config, stats, checksum.
std::string serialize_model(const TrainedModel& model);

/// Throws CorruptDocument on parse errors, checksum mismatch, unknown version,
/// or a tree/stats/schema that violates the TrainedModel invariants.
TrainedModel deserialize_model(std::string_view document);

std::string sha256_hex(std::string_view bytes);

}  // namespace gg
