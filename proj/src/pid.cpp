#include "pmsim/pid.hpp"

namespace pmsim {

double pid_step(const PidConfig& cfg, PidState& st, double e) {
    const double dterm = cfg.filter_n * (cfg.kd * e - st.dfilt);
    const double u = cfg.kp * e + st.integ + dterm;
    st.integ += cfg.ki * cfg.ts * e;
    st.dfilt += cfg.ts * dterm;
    return u;
}

void pid_reset(PidState& st) {
    st = PidState{};
}

}  // namespace pmsim
