#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pmsim/kalman.hpp"
#include "pmsim/lti.hpp"
#include "pmsim/pid.hpp"
#include "pmsim/signal.hpp"

namespace pmsim {

inline constexpr int kPosture = 0;
inline constexpr int kMovement = 1;

// One control loop: a planner target, an optional anticipatory feedforward
// injection, a PID controller and a Kalman observer acting as the loop's
// internal model.
struct LoopConfig {
    std::string name;
    Signal target;
    Signal injection;  // anticipatory feedforward (zero signal when absent)
    PidConfig pid;
    KalmanConfig kalman;
};

struct SimConfig {
    double ts = 0.01;
    double duration = 10.0;
    std::vector<double> plant_num{1.0};       // transfer-function form kept for
    std::vector<double> plant_den{1.0, 0.5};  // serialization and equality
    StateSpace plant;
    std::array<LoopConfig, 2> loops;  // [kPosture], [kMovement]
    Signal disturbance;               // added to the measured output after the plant
    Eigen::VectorXd x0;               // initial plant state (zeros by default)
    std::vector<std::string> warnings;  // e.g. grid-snapped event times
};

struct TraceRow {
    double t;
    double posture_target, posture_apa, posture_error, posture_cmd, posture_est;
    double movement_target, movement_apa, movement_error, movement_cmd, movement_est;
    double disturbance, plant_raw, y;
};

struct Trace {
    std::vector<TraceRow> rows;
    // Set when an observer's internal model differs from the plant (never the
    // case for file-loadable scenarios; API users can construct it).
    bool model_mismatch = false;
};

struct Metrics {
    double final_y = 0.0;
    double movement_plateau = 0.0;
    double max_apa_deviation = 0.0;
    double movement_error_at_onset = 0.0;
    bool settled = true;
};

class SimulationError : public std::runtime_error {
  public:
    SimulationError(long step, std::string signal);
    long step() const { return step_; }
    const std::string& signal() const { return signal_; }

  private:
    long step_;
    std::string signal_;
};

// Number of grid intervals; the trace has grid_steps(...)+1 samples at t = k*ts.
long grid_steps(double duration, double ts);
// Nearest grid time k*ts to t (k >= 0).
double snap_to_grid(double t, double ts);

// Advances both loops and the shared plant over the full duration.
//
// Per step k (t = k*ts):
//   1. evaluate targets, injections and the disturbance;
//   2. error_i = target_i - estimate_i from step k-1 (0 at k=0; the one-step
//      delay breaks the algebraic loop);
//   3. command_i = pid_step(error_i);
//   4. plant input u = command_p + command_m + injection_p + injection_m;
//      (state', plant_raw) = lti_step(plant, u); y = plant_raw + disturbance.
//      Injections bypass the controllers and the efference copies: they are
//      open-loop feedforward the observers can only explain via innovation.
//   5. each observer consumes its own command as efference copy and the
//      shared measurement with the partner's predicted output removed
//      (y - yhat_partner), i.e. both are corrected by the joint innovation
//      y - yhat_p - yhat_m. Correcting each filter against the full y instead
//      makes both estimates chase the combined output and the closed loop
//      unstable at small ts.
//   6. append a TraceRow.
//
// Identical configs yield bitwise-identical traces. Throws SimulationError
// with the step index and signal name if any signal turns non-finite.
Trace simulate(const SimConfig& cfg);

// Grid lookup of y at t (throws std::out_of_range outside the trace span).
double y_at(const Trace& tr, double t);
// Mean of y over grid samples with t0 <= t < t1 (throws std::out_of_range if
// the window contains no samples).
double window_mean(const Trace& tr, double t0, double t1);

// Scalar summary of a run:
//  - final_y: last sample of y;
//  - movement_plateau: mean of y over the last 0.5 s of the movement target's
//    pulse window when the movement target contains exactly one pulse, else
//    over the last 0.5 s of the run;
//  - max_apa_deviation: max |y - posture target| over samples where either
//    injection is nonzero (0 when there is no injection window);
//  - movement_error_at_onset: movement error at the first sample with a
//    nonzero movement target (0 when the movement target is identically 0);
//  - settled: |y - (posture+movement target at duration)| < 0.01 over the
//    last 0.5 s.
Metrics compute_metrics(const Trace& tr, const SimConfig& cfg);

inline const std::array<std::string, 4> kPaperScenarioIds = {
    "posture", "posture_ext_perturb", "pm_no_apa", "pm_apa"};

// Built-in scenario configs (see scenarios/*.scn for the file equivalents).
// Throws std::invalid_argument on an unknown id.
SimConfig paper_scenario_config(const std::string& id);
std::pair<Trace, Metrics> run_paper_scenario(const std::string& id);

}  // namespace pmsim
