#pragma once

#include <string>
#include <utility>

#include "swr/core/params.hpp"
#include "swr/models/model.hpp"

namespace swr::data {

// Binary checkpoint, little-endian: magic "SWRC" | u32 version=1 | serialized
// ModelSpec | u32 parameter count | per parameter: u32 name length, name
// bytes, u32 rows, u32 cols, rows*cols float64. Parameter doubles roundtrip
// bit-exactly.
void save_checkpoint(const models::ModelSpec& spec, const ParamStore& params,
                     const std::string& path);

// Validates the stored tensors against the architecture implied by the stored
// spec (names, order, shapes) and, when `expected` is given, that the stored
// spec matches it field by field. Mismatches raise std::runtime_error naming
// the offending field or tensor.
std::pair<models::ModelSpec, ParamStore> load_checkpoint(
    const std::string& path, const models::ModelSpec* expected = nullptr);

}  // namespace swr::data
