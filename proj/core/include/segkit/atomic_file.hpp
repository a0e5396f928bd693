#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string_view>

namespace segkit {

/// Writes through a sibling temporary file and renames it into place, so
/// readers never observe a partially written file.
void write_file_atomic(std::filesystem::path const& path, std::string_view contents);
void write_file_atomic(std::filesystem::path const& path, std::span<std::byte const> contents);

/// Runs `writer` against a temporary path, then renames it onto `path`.
void write_atomic_with(std::filesystem::path const& path,
                       std::function<void(std::filesystem::path const&)> const& writer);

std::string read_text_file(std::filesystem::path const& path);

} // namespace segkit
