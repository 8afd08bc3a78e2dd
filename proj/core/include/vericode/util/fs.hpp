#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace vericode {

/// Whole file as bytes. Throws IoError.
std::string read_file(const std::filesystem::path& path);

/// Writes a sibling temp file, syncs it, renames it over `path` and syncs the
/// directory: readers see the old or the new content, never a mix.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// One append (O_APPEND) followed by fsync.
void append_durably(const std::filesystem::path& path, std::string_view content);

}  // namespace vericode
