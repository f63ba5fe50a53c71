#include "pmsim/scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "pmsim/textio.hpp"

namespace pmsim {

namespace {

// Loop gains: proportional 0.5 with integral 8/s settles each tracking loop
// well inside the scenarios' 2 s event spacing while keeping feedforward
// leak-through numerically resolvable at the default step.
constexpr double kDefaultKp = 0.5;
constexpr double kDefaultKi = 8.0;
constexpr double kDefaultKd = 0.0;
constexpr double kDefaultFilterN = 100.0;
constexpr double kDefaultG = 0.2;
constexpr double kDefaultQw = 1.0;
constexpr double kDefaultRv = 1.0;

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string w;
    while (in >> w) out.push_back(parse_double(w));
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

std::string list_to_text(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += format_double(v[i]);
    }
    return out;
}

void snap_signal(Signal& s, double ts, const std::string& label,
                 std::vector<std::string>* warnings) {
    auto snap_field = [&](double& t, const char* what) {
        const double snapped = snap_to_grid(t, ts);
        // Snapping to the nearest grid point moves a time by at most ts/2;
        // larger moves (times clamped from before t = 0) merit a warning.
        if (std::abs(snapped - t) > ts * 0.5 && warnings)
            warnings->push_back(label + " " + what + " " + format_double(t) +
                                " snapped to grid time " + format_double(snapped));
        t = snapped;
    };
    switch (s.kind) {
        case Signal::Kind::Constant:
            break;
        case Signal::Kind::Step:
            snap_field(s.onset, "onset");
            break;
        case Signal::Kind::Pulse:
            snap_field(s.onset, "onset");
            snap_field(s.offset, "offset");
            if (!(s.onset < s.offset))
                throw ScenarioError(0, label + ": pulse onset must stay below offset "
                                           "after grid snapping");
            break;
        case Signal::Kind::Sum:
            for (Signal& term : s.terms) snap_signal(term, ts, label, warnings);
            break;
    }
}

// Validates, snaps event times and rebuilds all derived state (plant
// realization, controller sample times, observer gains).
void finalize(SimConfig& cfg, bool collect_warnings) {
    if (!(cfg.ts > 0.0)) throw ScenarioError(0, "ts must be > 0");
    if (!(cfg.duration >= cfg.ts)) throw ScenarioError(0, "duration must be >= ts");

    if (cfg.plant_den.size() < 2)
        throw ScenarioError(0, "plant den must have at least 2 coefficients "
                               "(a degenerate denominator leaves no dynamics)");
    if (cfg.plant_den.front() == 0.0)
        throw ScenarioError(0, "plant den leading coefficient must be nonzero");
    if (cfg.plant_num.empty())
        throw ScenarioError(0, "plant num must not be empty");
    if (cfg.plant_num.size() > cfg.plant_den.size())
        throw ScenarioError(0, "plant den shorter than num (improper system)");
    cfg.plant = tf_to_ss(cfg.plant_num, cfg.plant_den);
    const int order = cfg.plant.order();

    if (cfg.x0.size() == 0) cfg.x0 = Eigen::VectorXd::Zero(order);
    if (cfg.x0.size() != order)
        throw ScenarioError(0, "x0 length " + std::to_string(cfg.x0.size()) +
                                   " does not match plant order " + std::to_string(order));

    std::vector<std::string>* warn = collect_warnings ? &cfg.warnings : nullptr;
    for (LoopConfig& loop : cfg.loops) {
        loop.pid.ts = cfg.ts;
        if (loop.pid.kd != 0.0 && !(loop.pid.filter_n > 0.0))
            throw ScenarioError(0, loop.name + ": n must be > 0 when kd is nonzero");
        snap_signal(loop.target, cfg.ts, loop.name + " target", warn);
        snap_signal(loop.injection, cfg.ts, loop.name + " apa", warn);
        NoiseModel noise = loop.kalman.noise;
        if (noise.g.size() != order)
            throw ScenarioError(0, loop.name + ": g length " +
                                       std::to_string(noise.g.size()) +
                                       " does not match plant order " +
                                       std::to_string(order));
        try {
            loop.kalman = make_kalman(cfg.plant, noise);
        } catch (const std::exception& e) {
            throw ScenarioError(0, loop.name + ": " + e.what());
        }
    }
    snap_signal(cfg.disturbance, cfg.ts, "disturbance", warn);
}

enum class Section { None, Simulation, Plant, Posture, Movement, Disturbance };

Section section_from_name(const std::string& name) {
    if (name == "simulation") return Section::Simulation;
    if (name == "plant") return Section::Plant;
    if (name == "posture") return Section::Posture;
    if (name == "movement") return Section::Movement;
    if (name == "disturbance") return Section::Disturbance;
    return Section::None;
}

}  // namespace

ScenarioError::ScenarioError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
      line_(line) {}

SimConfig default_config() {
    SimConfig cfg;
    cfg.ts = 0.01;
    cfg.duration = 10.0;
    cfg.plant_num = {1.0};
    cfg.plant_den = {1.0, 0.5};
    cfg.disturbance = constant(0.0);

    cfg.loops[kPosture].name = "posture";
    cfg.loops[kPosture].target = step(0.0, 1.0);
    cfg.loops[kMovement].name = "movement";
    cfg.loops[kMovement].target = constant(0.0);
    for (LoopConfig& loop : cfg.loops) {
        loop.injection = constant(0.0);
        loop.pid = PidConfig{kDefaultKp, kDefaultKi, kDefaultKd, kDefaultFilterN, cfg.ts};
        loop.kalman.noise = NoiseModel{Eigen::VectorXd::Constant(1, kDefaultG), 0.0,
                                       kDefaultQw, kDefaultRv};
    }
    finalize(cfg, false);
    return cfg;
}

SimConfig parse_scenario(const std::string& text) {
    SimConfig cfg = default_config();
    cfg.warnings.clear();
    cfg.x0.resize(0);  // re-zeroed to the (possibly overridden) plant order

    Section section = Section::None;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;

    auto num = [&](const std::string& value) {
        try {
            return parse_double(value);
        } catch (const std::exception&) {
            throw ScenarioError(lineno, "malformed number '" + value + "'");
        }
    };
    auto numlist = [&](const std::string& value) {
        try {
            return parse_double_list(value);
        } catch (const std::exception&) {
            throw ScenarioError(lineno, "malformed number list '" + value + "'");
        }
    };
    auto sig = [&](const std::string& value) {
        try {
            return parse_signal(value);
        } catch (const std::exception& e) {
            throw ScenarioError(lineno, std::string("bad signal: ") + e.what());
        }
    };

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (size_t hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ScenarioError(lineno, "malformed section header '" + line + "'");
            const std::string name = trim(line.substr(1, line.size() - 2));
            section = section_from_name(name);
            if (section == Section::None)
                throw ScenarioError(lineno, "unknown section '" + name + "'");
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ScenarioError(lineno, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ScenarioError(lineno, "missing key before '='");
        if (value.empty()) throw ScenarioError(lineno, "missing value for key '" + key + "'");
        if (section == Section::None)
            throw ScenarioError(lineno, "key '" + key + "' outside any [section]");

        static const std::array<std::string, 5> kSectionNames = {
            "simulation", "plant", "posture", "movement", "disturbance"};
        const std::string ident =
            kSectionNames[static_cast<size_t>(section) - 1] + "." + key;
        if (!seen.insert(ident).second)
            throw ScenarioError(lineno, "duplicate key '" + key + "' in section");

        auto unknown_key = [&]() {
            throw ScenarioError(lineno, "unknown key '" + key + "' in section [" +
                                            kSectionNames[static_cast<size_t>(section) - 1] +
                                            "]");
        };

        switch (section) {
            case Section::Simulation:
                if (key == "ts") cfg.ts = num(value);
                else if (key == "duration") cfg.duration = num(value);
                else unknown_key();
                break;
            case Section::Plant:
                if (key == "num") cfg.plant_num = numlist(value);
                else if (key == "den") cfg.plant_den = numlist(value);
                else if (key == "x0") {
                    const std::vector<double> v = numlist(value);
                    cfg.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                               static_cast<long>(v.size()));
                } else unknown_key();
                break;
            case Section::Posture:
            case Section::Movement: {
                LoopConfig& loop =
                    cfg.loops[section == Section::Posture ? kPosture : kMovement];
                if (key == "target") loop.target = sig(value);
                else if (key == "apa") loop.injection = sig(value);
                else if (key == "kp") loop.pid.kp = num(value);
                else if (key == "ki") loop.pid.ki = num(value);
                else if (key == "kd") loop.pid.kd = num(value);
                else if (key == "n") loop.pid.filter_n = num(value);
                else if (key == "qw") loop.kalman.noise.qw = num(value);
                else if (key == "rv") loop.kalman.noise.rv = num(value);
                else if (key == "h") loop.kalman.noise.h = num(value);
                else if (key == "g") {
                    const std::vector<double> v = numlist(value);
                    loop.kalman.noise.g = Eigen::Map<const Eigen::VectorXd>(
                        v.data(), static_cast<long>(v.size()));
                } else unknown_key();
                break;
            }
            case Section::Disturbance:
                if (key == "signal") cfg.disturbance = sig(value);
                else unknown_key();
                break;
            case Section::None:
                break;
        }
    }

    finalize(cfg, true);
    return cfg;
}

std::string serialize_scenario(const SimConfig& cfg) {
    std::string out;
    out += "[simulation]\n";
    out += "ts = " + format_double(cfg.ts) + "\n";
    out += "duration = " + format_double(cfg.duration) + "\n";
    out += "\n[plant]\n";
    out += "num = " + list_to_text(cfg.plant_num) + "\n";
    out += "den = " + list_to_text(cfg.plant_den) + "\n";
    std::vector<double> x0(cfg.x0.data(), cfg.x0.data() + cfg.x0.size());
    out += "x0 = " + list_to_text(x0) + "\n";
    for (const LoopConfig& loop : cfg.loops) {
        out += "\n[" + loop.name + "]\n";
        out += "target = " + signal_to_text(loop.target) + "\n";
        out += "apa = " + signal_to_text(loop.injection) + "\n";
        out += "kp = " + format_double(loop.pid.kp) + "\n";
        out += "ki = " + format_double(loop.pid.ki) + "\n";
        out += "kd = " + format_double(loop.pid.kd) + "\n";
        out += "n = " + format_double(loop.pid.filter_n) + "\n";
        out += "qw = " + format_double(loop.kalman.noise.qw) + "\n";
        out += "rv = " + format_double(loop.kalman.noise.rv) + "\n";
        std::vector<double> g(loop.kalman.noise.g.data(),
                              loop.kalman.noise.g.data() + loop.kalman.noise.g.size());
        out += "g = " + list_to_text(g) + "\n";
        out += "h = " + format_double(loop.kalman.noise.h) + "\n";
    }
    out += "\n[disturbance]\n";
    out += "signal = " + signal_to_text(cfg.disturbance) + "\n";
    return out;
}

bool config_equal(const SimConfig& a, const SimConfig& b) {
    auto loops_equal = [](const LoopConfig& x, const LoopConfig& y) {
        return x.name == y.name && x.target == y.target && x.injection == y.injection &&
               x.pid.kp == y.pid.kp && x.pid.ki == y.pid.ki && x.pid.kd == y.pid.kd &&
               x.pid.filter_n == y.pid.filter_n && x.pid.ts == y.pid.ts &&
               x.kalman.noise == y.kalman.noise;
    };
    return a.ts == b.ts && a.duration == b.duration && a.plant_num == b.plant_num &&
           a.plant_den == b.plant_den && a.x0.size() == b.x0.size() && a.x0 == b.x0 &&
           loops_equal(a.loops[0], b.loops[0]) && loops_equal(a.loops[1], b.loops[1]) &&
           a.disturbance == b.disturbance;
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : path) {
        if (ch == '.') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

bool set_loop_scalar(LoopConfig& loop, const std::string& key, double value) {
    if (key == "kp") loop.pid.kp = value;
    else if (key == "ki") loop.pid.ki = value;
    else if (key == "kd") loop.pid.kd = value;
    else if (key == "n") loop.pid.filter_n = value;
    else if (key == "qw") loop.kalman.noise.qw = value;
    else if (key == "rv") loop.kalman.noise.rv = value;
    else if (key == "h") loop.kalman.noise.h = value;
    else if (key == "g") {
        if (loop.kalman.noise.g.size() != 1)
            throw ScenarioError(0, "parameter 'g' is a vector for this plant order; "
                                   "set it in the scenario file");
        loop.kalman.noise.g(0) = value;
    } else return false;
    return true;
}

void set_signal_field(Signal& s, const std::string& owner, const std::string& field,
                      double value) {
    const char* shape = s.kind == Signal::Kind::Constant ? "constant"
                        : s.kind == Signal::Kind::Step   ? "step"
                        : s.kind == Signal::Kind::Pulse  ? "pulse"
                                                         : "sum";
    if (s.kind == Signal::Kind::Sum)
        throw ScenarioError(0, "cannot set '" + owner + "." + field +
                                   "' on a sum signal");
    if (field == "amplitude") {
        s.value = value;
        return;
    }
    if (field == "onset" && (s.kind == Signal::Kind::Step || s.kind == Signal::Kind::Pulse)) {
        s.onset = value;
        return;
    }
    if (field == "offset" && s.kind == Signal::Kind::Pulse) {
        s.offset = value;
        return;
    }
    throw ScenarioError(0, "signal shape '" + std::string(shape) + "' has no field '" +
                               field + "' (path " + owner + "." + field + ")");
}

}  // namespace

void set_param(SimConfig& cfg, const std::string& path, double value) {
    const std::vector<std::string> parts = split_path(path);
    auto unknown = [&]() {
        throw ScenarioError(0, "unknown parameter path '" + path + "'");
    };

    if (parts.size() == 1) {
        if (parts[0] == "ts") cfg.ts = value;
        else if (parts[0] == "duration") cfg.duration = value;
        else {
            // bare gain/noise keys apply to both loops
            if (!set_loop_scalar(cfg.loops[0], parts[0], value)) unknown();
            set_loop_scalar(cfg.loops[1], parts[0], value);
        }
    } else if (parts.size() == 2 && parts[0] == "disturbance") {
        set_signal_field(cfg.disturbance, "disturbance", parts[1], value);
    } else if (parts.size() == 2 || parts.size() == 3) {
        LoopConfig* loop = nullptr;
        if (parts[0] == "posture") loop = &cfg.loops[kPosture];
        else if (parts[0] == "movement") loop = &cfg.loops[kMovement];
        else unknown();
        if (parts.size() == 2) {
            if (!set_loop_scalar(*loop, parts[1], value)) unknown();
        } else if (parts[1] == "target") {
            set_signal_field(loop->target, parts[0] + ".target", parts[2], value);
        } else if (parts[1] == "apa") {
            set_signal_field(loop->injection, parts[0] + ".apa", parts[2], value);
        } else {
            unknown();
        }
    } else {
        unknown();
    }

    finalize(cfg, false);
}

void apply_override(SimConfig& cfg, const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ScenarioError(0, "override must be <param>=<value>, got '" + assignment + "'");
    const std::string path = trim(assignment.substr(0, eq));
    const std::string value_text = trim(assignment.substr(eq + 1));
    double value;
    try {
        value = parse_double(value_text);
    } catch (const std::exception&) {
        throw ScenarioError(0, "malformed override value '" + value_text + "'");
    }
    set_param(cfg, path, value);
}

}  // namespace pmsim
