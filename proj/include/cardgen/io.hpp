#pragma once

#include <filesystem>
#include <string>

namespace cardgen::io {

std::string read_text_file(const std::filesystem::path& path);

// Writes via a sibling temp file + rename so readers never observe a
// half-written file.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace cardgen::io
