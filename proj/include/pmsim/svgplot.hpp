#pragma once

#include <string>

#include "pmsim/engine.hpp"

namespace pmsim {

// Static SVG line plot of a trace: targets as colored dashed series, measured
// output y as a solid black series, with axes and tick labels.
std::string trace_to_svg(const Trace& tr);

}  // namespace pmsim
