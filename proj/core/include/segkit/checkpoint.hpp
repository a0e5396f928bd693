#pragma once

#include "segkit/feature_map.hpp"
#include "segkit/head.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace segkit {

/// Named tensors: "SKCK" | u32 version=1 | u32 count | per section: u32 name
/// length, UTF-8 name, one FEAT-encoded tensor.
std::vector<std::byte> encode_sections(std::vector<std::pair<std::string, Tensor>> const& sections);
std::vector<std::pair<std::string, Tensor>> decode_sections(std::span<std::byte const> bytes);

/// Parameters are stored as 32-bit floats.
void save_checkpoint(std::filesystem::path const& path, ToyHead const& head);
ToyHead load_checkpoint(std::filesystem::path const& path);

} // namespace segkit
