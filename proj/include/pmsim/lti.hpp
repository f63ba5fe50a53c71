#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace pmsim {

// Discrete-time SISO linear system  x' = a x + b u,  y = c x + d u.
struct StateSpace {
    Eigen::MatrixXd a;     // n x n
    Eigen::VectorXd b;     // n x 1
    Eigen::RowVectorXd c;  // 1 x n
    double d = 0.0;

    int order() const { return static_cast<int>(a.rows()); }
    bool operator==(const StateSpace& o) const {
        return a.rows() == o.a.rows() && a == o.a && b == o.b && c == o.c && d == o.d;
    }
};

// Controllable-canonical realization of num/den (coefficients highest power
// first, denominator normalized to monic). A constant ratio (den of degree 0)
// is padded to an order-1 realization with the gain in d.
// Throws std::invalid_argument on a zero leading denominator coefficient or
// an improper ratio (numerator longer than denominator).
StateSpace tf_to_ss(const std::vector<double>& num, const std::vector<double>& den);

// One step: returns (x', y) where y is computed from the incoming state.
// Throws std::invalid_argument on state/model dimension mismatch.
std::pair<Eigen::VectorXd, double> lti_step(const StateSpace& m,
                                            const Eigen::VectorXd& x, double u);

// Steady-state output per unit constant input: c (I - a)^-1 b + d.
// Throws std::domain_error if (I - a) is singular (pole at z = 1).
double dc_gain(const StateSpace& m);

}  // namespace pmsim
