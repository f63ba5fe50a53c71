#include "pmsim/kalman.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pmsim {

namespace {

Eigen::MatrixXd dare_map(const Eigen::MatrixXd& a, const Eigen::RowVectorXd& c,
                         const Eigen::MatrixXd& q_eff, double r,
                         const Eigen::MatrixXd& p) {
    const double s = (c * p * c.transpose())(0) + r;
    const Eigen::VectorXd apc = a * p * c.transpose();
    return a * p * a.transpose() - (apc * apc.transpose()) / s + q_eff;
}

}  // namespace

DareResult solve_dare(const Eigen::MatrixXd& a, const Eigen::RowVectorXd& c,
                      const Eigen::MatrixXd& q_eff, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("solve_dare: r must be > 0");
    const int cap = 1000000;
    Eigen::MatrixXd p = q_eff;
    double change = 0.0;
    for (int it = 1; it <= cap; ++it) {
        Eigen::MatrixXd pn = dare_map(a, c, q_eff, r, p);
        change = (pn - p).cwiseAbs().maxCoeff();
        p = std::move(pn);
        if (change < 1e-14) {
            DareResult res;
            res.p = p;
            const double s = (c * p * c.transpose())(0) + r;
            res.l = a * p * c.transpose() / s;
            res.iterations = it;
            res.residual = (p - dare_map(a, c, q_eff, r, p)).cwiseAbs().maxCoeff();
            return res;
        }
    }
    std::ostringstream msg;
    msg << "solve_dare: no convergence after " << cap
        << " iterations (last change " << change << ")";
    throw std::runtime_error(msg.str());
}

KalmanConfig make_kalman(const StateSpace& model, const NoiseModel& noise) {
    if (noise.g.size() != model.order())
        throw std::invalid_argument("make_kalman: g length must equal the model order");
    if (noise.qw < 0.0) throw std::invalid_argument("make_kalman: qw must be >= 0");
    if (!(noise.rv > 0.0)) throw std::invalid_argument("make_kalman: rv must be > 0");

    const Eigen::MatrixXd q_eff = noise.g * noise.qw * noise.g.transpose();
    DareResult dare = solve_dare(model.a, model.c, q_eff, noise.rv);
    if (dare.residual >= 1e-10)
        throw std::runtime_error("make_kalman: gain residual above tolerance");

    KalmanConfig cfg;
    cfg.model = model;
    cfg.noise = noise;
    cfg.gain_l = std::move(dare.l);
    return cfg;
}

KalmanState make_kalman_state(const KalmanConfig& cfg) {
    return KalmanState{Eigen::VectorXd::Zero(cfg.model.order())};
}

double kalman_predict_output(const KalmanConfig& cfg, const KalmanState& st, double u) {
    return cfg.model.c.dot(st.xhat) + cfg.model.d * u;
}

KalmanStepOut kalman_step(const KalmanConfig& cfg, KalmanState& st, double u, double y) {
    KalmanStepOut out;
    out.yhat = kalman_predict_output(cfg, st, u);
    out.innovation = y - out.yhat;
    st.xhat = cfg.model.a * st.xhat + cfg.model.b * u + cfg.gain_l * out.innovation;
    out.estimate = cfg.model.c.dot(st.xhat);
    return out;
}

}  // namespace pmsim
