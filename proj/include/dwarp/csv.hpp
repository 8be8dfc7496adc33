#pragma once

#include <filesystem>
#include <string>

#include "dwarp/experiments.hpp"

namespace dwarp {

/// Shortest decimal that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_real(Real x);

/// Header line plus one line per row, '\n' terminated. Strings with
/// commas, quotes or newlines are quoted.
std::string to_csv(const Table& table);

/// Writes `path.partial`, then renames it to `path` when `complete`.
/// Returns the path actually written.
std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text, bool complete = true);

}  // namespace dwarp
