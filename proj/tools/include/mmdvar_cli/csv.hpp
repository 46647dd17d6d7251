#pragma once

#include <string>
#include <string_view>

#include "mmdvar/sample_set.hpp"

namespace mmdvar::cli {

/// Parses comma-separated numeric text, one observation per line. A first
/// line whose leading cell is not a number is taken as a header and
/// skipped. Blank lines are ignored. Throws InputError on ragged rows,
/// non-numeric or non-finite cells and on input without data rows; the
/// message names the 1-based line.
SampleSet parse_csv(std::string_view text);

/// Reads and parses `path`. Errors are prefixed with the path.
SampleSet load_csv(const std::string& path);

}  // namespace mmdvar::cli
