#pragma once

#include <string>
#include <vector>

#include "pmsim/engine.hpp"

namespace pmsim {

// Parse/validation failure with a 1-based source line (0 when no line applies).
class ScenarioError : public std::runtime_error {
  public:
    ScenarioError(int line, const std::string& msg);
    int line() const { return line_; }

  private:
    int line_;
};

// All-defaults config: the steady-posture scenario (posture target step 0 1,
// movement idle, no injection, no disturbance).
SimConfig default_config();

// Line-oriented scenario text:
//   [section]            sections: simulation, plant, posture, movement, disturbance
//   key = value          # comment to end of line
// Keys: [simulation] ts, duration; [plant] num, den, x0;
// [posture]/[movement] target, apa, kp, ki, kd, n, qw, rv, g, h;
// [disturbance] signal. Signal values use the signals textual form; numeric
// lists are space-separated. Omitted keys take the defaults above. Unknown
// sections/keys, duplicate keys, malformed numbers and malformed signals are
// errors with line numbers. Event times are snapped to the ts grid, recording
// a warning on the config when a time actually moved.
SimConfig parse_scenario(const std::string& text);

// Canonical complete document (fixed key order, round-trip-exact numbers).
// parse_scenario(serialize_scenario(c)) reproduces c exactly.
std::string serialize_scenario(const SimConfig& cfg);

// Equality on everything the file format captures (derived state such as
// observer gains is determined by these fields).
bool config_equal(const SimConfig& a, const SimConfig& b);

// Numeric parameter paths for overrides and sweeps:
//   ts | duration
//   <loop>.kp|ki|kd|n|qw|rv|g|h          loop: posture | movement
//   kp|ki|kd|n|qw|rv|g|h                 bare: applies to both loops
//   <loop>.target.amplitude|onset|offset (onset/offset where the shape has them)
//   <loop>.apa.amplitude|onset|offset
//   disturbance.amplitude|onset|offset
// Re-snaps event times and revalidates/rebuilds derived state. Throws
// ScenarioError on unknown paths or values yielding an invalid config.
void set_param(SimConfig& cfg, const std::string& path, double value);

// "path=value" convenience used by CLI --set.
void apply_override(SimConfig& cfg, const std::string& assignment);

}  // namespace pmsim
