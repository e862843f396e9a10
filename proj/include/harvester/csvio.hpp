#pragma once

#include <string>
#include <vector>

#include "harvester/model.hpp"
#include "harvester/types.hpp"

namespace harvester {

// Shortest decimal text that round-trips a double ("%.17g" family).
std::string format_double(double v);

// Comment header stamped at the top of every output file: tool version plus
// the full parameter set, so a file is self-describing and reruns are
// byte-comparable.
std::string file_header(const BeamParameters& p);

// Write via temp file + rename so readers never observe a half-written file.
void write_text_atomic(const std::string& path, const std::string& content);

// CSV assembly helper: rows are pre-formatted cells.
std::string csv_table(const std::string& header_comment,
                      const std::vector<std::string>& columns,
                      const std::vector<std::vector<std::string>>& rows);

}  // namespace harvester
