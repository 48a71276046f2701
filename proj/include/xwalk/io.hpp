#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace xwalk::io {

std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Splits on '\n', dropping a trailing '\r' from each line. A final
/// empty line (after the last newline) is not returned.
std::vector<std::string_view> split_lines(std::string_view text);

/// Plain comma split; the file formats used here never quote fields.
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

/// Strict number parsing: the whole field must be consumed.
double parse_double(std::string_view field, std::string_view what);
long long parse_int(std::string_view field, std::string_view what);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace xwalk::io
