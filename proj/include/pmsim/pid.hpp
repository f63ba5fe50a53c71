#pragma once

namespace pmsim {

// Discrete parallel PID with a first-order filtered derivative.
// u = kp*e + integ + N*(kd*e - dfilt), with forward-Euler state updates
//   integ' = integ + ki*ts*e
//   dfilt' = dfilt + ts*N*(kd*e - dfilt)
struct PidConfig {
    double kp = 0.0;
    double ki = 0.0;        // 1/s
    double kd = 0.0;        // s
    double filter_n = 100;  // derivative filter coefficient, 1/s
    double ts = 0.01;       // s
};

struct PidState {
    double integ = 0.0;
    double dfilt = 0.0;
};

// Advances the state in place and returns the command.
double pid_step(const PidConfig& cfg, PidState& st, double e);

void pid_reset(PidState& st);

}  // namespace pmsim
