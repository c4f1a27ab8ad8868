#pragma once

#include <cstdint>
#include <string>

#include "bcpnn/model.hpp"

namespace bcpnn {

/// Versioned binary model container: configuration plus traces, all scalars
/// little-endian, doubles as raw IEEE-754 bit patterns. save(load(x)) is
/// byte-identical to x.
void save_snapshot(const Model& model, const std::string& path);
Model load_snapshot(const std::string& path);

std::string serialize_snapshot(const Model& model);
Model deserialize_snapshot(const std::string& bytes);

/// Digest of a snapshot file's bytes, as embedded in reports.
uint64_t snapshot_file_digest(const std::string& path);

}  // namespace bcpnn
