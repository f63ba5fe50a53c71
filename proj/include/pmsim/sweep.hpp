#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pmsim/engine.hpp"

namespace pmsim {

// One simulation per value applied to a copy of base at the given parameter
// path; rows in input order. Throws ScenarioError on an unknown path or a
// value producing an invalid config, std::invalid_argument on an empty list.
//
// sweep_serial is the reference implementation; sweep_parallel runs the
// points OpenMP-parallel (each simulation is independent and deterministic,
// so both return bitwise-identical results).
std::vector<std::pair<double, Metrics>> sweep_serial(
    const SimConfig& base, const std::string& path, const std::vector<double>& values);
std::vector<std::pair<double, Metrics>> sweep_parallel(
    const SimConfig& base, const std::string& path, const std::vector<double>& values);

}  // namespace pmsim
