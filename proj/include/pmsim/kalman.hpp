#pragma once

#include <Eigen/Dense>

#include "pmsim/lti.hpp"

namespace pmsim {

// Process/measurement noise description for the observer. The effective
// process noise covariance is g qw g^T; h is the process-noise feedthrough
// to the measurement (0 in every shipped scenario) and rv the measurement
// noise variance. No noise is sampled at runtime - the covariances only
// shape the steady-state gain.
struct NoiseModel {
    Eigen::VectorXd g;  // n x 1
    double h = 0.0;
    double qw = 1.0;
    double rv = 1.0;

    bool operator==(const NoiseModel& o) const {
        return g.size() == o.g.size() && g == o.g && h == o.h && qw == o.qw &&
               rv == o.rv;
    }
};

struct DareResult {
    Eigen::MatrixXd p;  // fixed-point covariance
    Eigen::VectorXd l;  // predictor gain a p c^T (c p c^T + r)^-1
    int iterations = 0;
    double residual = 0.0;
};

// Fixed-point iteration of p = a p a^T - a p c^T (c p c^T + r)^-1 c p a^T + q_eff
// from p0 = q_eff, stopping when the elementwise change is below 1e-14
// (cap 1e6 iterations). Throws std::runtime_error (with the last residual)
// on non-convergence, std::invalid_argument on r <= 0.
DareResult solve_dare(const Eigen::MatrixXd& a, const Eigen::RowVectorXd& c,
                      const Eigen::MatrixXd& q_eff, double r);

// Steady-state Kalman predictor: the loop's internal forward model.
struct KalmanConfig {
    StateSpace model;
    NoiseModel noise;
    Eigen::VectorXd gain_l;  // precomputed by make_kalman

    bool operator==(const KalmanConfig& o) const {
        return model == o.model && noise == o.noise &&
               gain_l.size() == o.gain_l.size() && gain_l == o.gain_l;
    }
};

struct KalmanState {
    Eigen::VectorXd xhat;
};

KalmanState make_kalman_state(const KalmanConfig& cfg);

// Solves the DARE for the model/noise pair and verifies the gain residual.
KalmanConfig make_kalman(const StateSpace& model, const NoiseModel& noise);

struct KalmanStepOut {
    double yhat = 0.0;        // c xhat + d u, prediction from the incoming estimate
    double innovation = 0.0;  // y - yhat
    double estimate = 0.0;    // c xhat' : the output estimate forwarded to the next step
};

// Predictor update: xhat' = a xhat + b u + l (y - yhat), advanced in place.
KalmanStepOut kalman_step(const KalmanConfig& cfg, KalmanState& st, double u, double y);

// Predicted output for the current estimate without advancing: c xhat + d u.
double kalman_predict_output(const KalmanConfig& cfg, const KalmanState& st, double u);

}  // namespace pmsim
