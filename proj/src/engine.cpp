#include "pmsim/engine.hpp"

#include <cmath>

#include "pmsim/scenario.hpp"

namespace pmsim {

SimulationError::SimulationError(long step, std::string signal)
    : std::runtime_error("non-finite value in '" + signal + "' at step " +
                         std::to_string(step)),
      step_(step),
      signal_(std::move(signal)) {}

long grid_steps(double duration, double ts) {
    const double q = duration / ts;
    long n = std::lround(q);
    if (std::abs(q - static_cast<double>(n)) > 1e-6) n = static_cast<long>(std::floor(q));
    return n;
}

double snap_to_grid(double t, double ts) {
    long k = std::lround(t / ts);
    if (k < 0) k = 0;
    return static_cast<double>(k) * ts;
}

Trace simulate(const SimConfig& cfg) {
    const long steps = grid_steps(cfg.duration, cfg.ts);

    Eigen::VectorXd x = cfg.x0;
    std::array<PidState, 2> pid_st{};
    std::array<KalmanState, 2> kal_st{make_kalman_state(cfg.loops[0].kalman),
                                      make_kalman_state(cfg.loops[1].kalman)};
    std::array<double, 2> est_prev{0.0, 0.0};

    Trace tr;
    tr.rows.reserve(static_cast<size_t>(steps) + 1);
    tr.model_mismatch = !(cfg.loops[0].kalman.model == cfg.plant) ||
                        !(cfg.loops[1].kalman.model == cfg.plant);

    for (long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * cfg.ts;

        std::array<double, 2> tgt, inj, err, cmd;
        for (int i = 0; i < 2; ++i) {
            tgt[i] = eval(cfg.loops[i].target, t);
            inj[i] = eval(cfg.loops[i].injection, t);
            err[i] = tgt[i] - est_prev[i];
            cmd[i] = pid_step(cfg.loops[i].pid, pid_st[i], err[i]);
        }
        const double dist = eval(cfg.disturbance, t);

        // Injections reach the plant but not the efference copies.
        const double u = cmd[0] + cmd[1] + inj[0] + inj[1];
        auto [xn, plant_raw] = lti_step(cfg.plant, x, u);
        const double y = plant_raw + dist;

        // Joint innovation: each observer explains only the share of y its
        // partner's prediction does not account for.
        std::array<double, 2> yhat;
        for (int i = 0; i < 2; ++i)
            yhat[i] = kalman_predict_output(cfg.loops[i].kalman, kal_st[i], cmd[i]);
        std::array<KalmanStepOut, 2> kout;
        for (int i = 0; i < 2; ++i)
            kout[i] = kalman_step(cfg.loops[i].kalman, kal_st[i], cmd[i], y - yhat[1 - i]);

        for (int i = 0; i < 2; ++i) {
            if (!std::isfinite(cmd[i])) throw SimulationError(k, cfg.loops[i].name + "_cmd");
            if (!std::isfinite(kout[i].estimate))
                throw SimulationError(k, cfg.loops[i].name + "_est");
        }
        if (!std::isfinite(y)) throw SimulationError(k, "y");

        tr.rows.push_back(TraceRow{t,
                                   tgt[0], inj[0], err[0], cmd[0], kout[0].estimate,
                                   tgt[1], inj[1], err[1], cmd[1], kout[1].estimate,
                                   dist, plant_raw, y});

        est_prev = {kout[0].estimate, kout[1].estimate};
        x = std::move(xn);
    }
    return tr;
}

double y_at(const Trace& tr, double t) {
    if (tr.rows.empty()) throw std::out_of_range("y_at: empty trace");
    const double ts = tr.rows.size() > 1 ? tr.rows[1].t - tr.rows[0].t : 1.0;
    const long k = std::lround(t / ts);
    if (k < 0 || k >= static_cast<long>(tr.rows.size()))
        throw std::out_of_range("y_at: t outside the trace span");
    return tr.rows[static_cast<size_t>(k)].y;
}

double window_mean(const Trace& tr, double t0, double t1) {
    double acc = 0.0;
    long n = 0;
    for (const TraceRow& r : tr.rows) {
        if (r.t >= t0 && r.t < t1) {
            acc += r.y;
            ++n;
        }
    }
    if (n == 0) throw std::out_of_range("window_mean: no samples in [t0, t1)");
    return acc / static_cast<double>(n);
}

namespace {

void collect_pulses(const Signal& s, std::vector<const Signal*>& out) {
    if (s.kind == Signal::Kind::Pulse) out.push_back(&s);
    if (s.kind == Signal::Kind::Sum)
        for (const Signal& term : s.terms) collect_pulses(term, out);
}

}  // namespace

Metrics compute_metrics(const Trace& tr, const SimConfig& cfg) {
    if (tr.rows.empty()) throw std::out_of_range("compute_metrics: empty trace");
    Metrics m;
    m.final_y = tr.rows.back().y;

    // Plateau window: the last 0.5 s of the movement pulse when there is
    // exactly one, else the last 0.5 s of the run.
    std::vector<const Signal*> pulses;
    collect_pulses(cfg.loops[kMovement].target, pulses);
    double w0, w1;
    if (pulses.size() == 1) {
        w1 = pulses[0]->offset;
        w0 = std::max(pulses[0]->onset, w1 - 0.5);
    } else {
        w1 = cfg.duration;
        w0 = std::max(0.0, w1 - 0.5);
    }
    m.movement_plateau = window_mean(tr, w0, w1);

    for (const TraceRow& r : tr.rows) {
        if (r.posture_apa != 0.0 || r.movement_apa != 0.0) {
            const double dev = std::abs(r.y - r.posture_target);
            if (dev > m.max_apa_deviation) m.max_apa_deviation = dev;
        }
    }

    for (const TraceRow& r : tr.rows) {
        if (r.movement_target != 0.0) {
            m.movement_error_at_onset = r.movement_error;
            break;
        }
    }

    const double expected = eval(cfg.loops[kPosture].target, cfg.duration) +
                            eval(cfg.loops[kMovement].target, cfg.duration);
    m.settled = true;
    for (const TraceRow& r : tr.rows)
        if (r.t >= cfg.duration - 0.5 && !(std::abs(r.y - expected) < 0.01))
            m.settled = false;
    return m;
}

SimConfig paper_scenario_config(const std::string& id) {
    SimConfig cfg = default_config();
    if (id == "posture") {
        // all defaults
    } else if (id == "posture_ext_perturb") {
        cfg.disturbance = pulse(5.0, 7.0, -5.0);
    } else if (id == "pm_no_apa") {
        cfg.loops[kMovement].target = pulse(5.0, 7.0, 5.0);
    } else if (id == "pm_apa") {
        cfg.loops[kMovement].target = pulse(5.0, 7.0, 5.0);
        cfg.loops[kPosture].injection = pulse(3.0, 5.0, -0.5);
    } else {
        throw std::invalid_argument("unknown paper scenario id '" + id + "'");
    }
    return cfg;
}

std::pair<Trace, Metrics> run_paper_scenario(const std::string& id) {
    const SimConfig cfg = paper_scenario_config(id);
    Trace tr = simulate(cfg);
    Metrics m = compute_metrics(tr, cfg);
    return {std::move(tr), m};
}

}  // namespace pmsim
