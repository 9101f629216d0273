#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace goba {

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames into place, so readers never see
// a partial file and reruns produce the target atomically.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& content);

// Regular files with the given extension, sorted by filename.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              const std::string& extension);

} // namespace goba
