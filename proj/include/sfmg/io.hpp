#pragma once

#include <string>

namespace sfmg {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Throws Error on I/O failure.
void write_file_atomic(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);

}  // namespace sfmg
