#include "pmsim/textio.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace pmsim {

std::string format_double(double v) {
    char buf[64];
    const std::to_chars_result r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const std::from_chars_result r = std::from_chars(first, last, v);
    if (r.ec != std::errc{} || r.ptr != last)
        throw std::invalid_argument("malformed number '" + text + "'");
    return v;
}

std::string trace_to_csv(const Trace& tr) {
    std::string out = kTraceCsvHeader + "\n";
    for (const TraceRow& r : tr.rows) {
        out += format_double(r.t);
        for (double v : {r.posture_target, r.posture_apa, r.posture_error, r.posture_cmd,
                         r.posture_est, r.movement_target, r.movement_apa,
                         r.movement_error, r.movement_cmd, r.movement_est, r.disturbance,
                         r.plant_raw, r.y}) {
            out += ",";
            out += format_double(v);
        }
        out += "\n";
    }
    if (tr.model_mismatch)
        out += "# observer internal model differs from the plant\n";
    return out;
}

std::string metrics_to_text(const Metrics& m) {
    std::string out;
    out += "final_y=" + format_double(m.final_y) + "\n";
    out += "movement_plateau=" + format_double(m.movement_plateau) + "\n";
    out += "max_apa_deviation=" + format_double(m.max_apa_deviation) + "\n";
    out += "movement_error_at_onset=" + format_double(m.movement_error_at_onset) + "\n";
    out += std::string("settled=") + (m.settled ? "true" : "false") + "\n";
    return out;
}

std::string sweep_to_csv(const std::vector<std::pair<double, Metrics>>& rows) {
    std::string out =
        "value,final_y,movement_plateau,max_apa_deviation,movement_error_at_onset,settled\n";
    for (const auto& [value, m] : rows) {
        out += format_double(value);
        out += "," + format_double(m.final_y);
        out += "," + format_double(m.movement_plateau);
        out += "," + format_double(m.max_apa_deviation);
        out += "," + format_double(m.movement_error_at_onset);
        out += std::string(",") + (m.settled ? "true" : "false") + "\n";
    }
    return out;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) return false;
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    return static_cast<bool>(f);
}

}  // namespace pmsim
