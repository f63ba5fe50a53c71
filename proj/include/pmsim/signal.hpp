#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pmsim {

// Declarative time function used for targets, feedforward injections and
// disturbances. A small closed set of shapes keeps scenarios serializable
// and evaluation pure.
struct Signal {
    enum class Kind { Constant, Step, Pulse, Sum };

    Kind kind = Kind::Constant;
    double value = 0.0;   // constant value, or step/pulse amplitude
    double onset = 0.0;   // step/pulse activation time
    double offset = 0.0;  // pulse deactivation time (half-open window)
    std::vector<Signal> terms;  // sum members

    bool operator==(const Signal&) const = default;
};

Signal constant(double value);
Signal step(double onset, double amplitude);
// Throws std::invalid_argument unless onset < offset.
Signal pulse(double onset, double offset, double amplitude);
Signal sum(std::vector<Signal> terms);

// Pulses are active on [onset, offset): a pulse "for 2 seconds" starting at 5
// is nonzero at t in [5, 7) and exactly 0 at t = 7.
double eval(const Signal& s, double t);

// Samples at t = 0, ts, 2*ts, ..., floor(duration/ts)*ts.
// Throws std::invalid_argument on non-positive ts or duration.
std::vector<double> sample(const Signal& s, double ts, double duration);

// Textual form used in scenario files:
//   constant V | step T0 V | pulse T0 T1 V | sum( <signal> ; <signal> ; ... )
std::string signal_to_text(const Signal& s);
// Throws std::invalid_argument with a description on malformed input.
Signal parse_signal(const std::string& text);

}  // namespace pmsim
