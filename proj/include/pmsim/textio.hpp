#pragma once

#include <string>
#include <vector>

#include "pmsim/engine.hpp"

namespace pmsim {

// Shortest decimal form that parses back to the same double ('.' separator,
// locale-independent).
std::string format_double(double v);
// Strict full-string double parse; throws std::invalid_argument.
double parse_double(const std::string& text);

inline const std::string kTraceCsvHeader =
    "t,posture_target,posture_apa,posture_error,posture_cmd,posture_est,"
    "movement_target,movement_apa,movement_error,movement_cmd,movement_est,"
    "disturbance,plant_raw,y";

// One row per sample, LF line endings, round-trip-exact numbers.
std::string trace_to_csv(const Trace& tr);

// Flat key=value lines.
std::string metrics_to_text(const Metrics& m);

// value,<metric columns> rows for a parameter sweep.
std::string sweep_to_csv(const std::vector<std::pair<double, Metrics>>& rows);

// Returns false on any I/O failure.
bool write_file(const std::string& path, const std::string& content);

}  // namespace pmsim
