#include "pmsim/lti.hpp"

#include <cmath>
#include <stdexcept>

namespace pmsim {

StateSpace tf_to_ss(const std::vector<double>& num, const std::vector<double>& den) {
    if (den.empty() || num.empty())
        throw std::invalid_argument("tf_to_ss: empty coefficient list");
    if (den.front() == 0.0)
        throw std::invalid_argument("tf_to_ss: zero leading denominator coefficient");
    if (num.size() > den.size())
        throw std::invalid_argument("tf_to_ss: improper system (numerator longer than denominator)");

    // Monic denominator z^n + d1 z^(n-1) + ... + dn.
    const int n = static_cast<int>(den.size()) - 1;
    std::vector<double> d_monic(den.size());
    for (size_t i = 0; i < den.size(); ++i) d_monic[i] = den[i] / den.front();

    // Pad the numerator to den length, then split off the feedthrough:
    // num = d*den_monic + remainder with remainder strictly proper.
    std::vector<double> n_pad(den.size(), 0.0);
    const size_t shift = den.size() - num.size();
    for (size_t i = 0; i < num.size(); ++i) n_pad[shift + i] = num[i] / den.front();
    const double d = n_pad[0];
    std::vector<double> rem(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) rem[static_cast<size_t>(i)] =
        n_pad[static_cast<size_t>(i) + 1] - d * d_monic[static_cast<size_t>(i) + 1];

    StateSpace m;
    if (n == 0) {
        // Pure gain: order-1 padding so every model has a (trivial) state.
        m.a = Eigen::MatrixXd::Zero(1, 1);
        m.b = Eigen::VectorXd::Zero(1);
        m.c = Eigen::RowVectorXd::Zero(1);
        m.d = d;
        return m;
    }

    // Controllable canonical (top-row companion) form.
    m.a = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) m.a(0, j) = -d_monic[static_cast<size_t>(j) + 1];
    for (int i = 1; i < n; ++i) m.a(i, i - 1) = 1.0;
    m.b = Eigen::VectorXd::Zero(n);
    m.b(0) = 1.0;
    m.c = Eigen::RowVectorXd::Zero(n);
    for (int j = 0; j < n; ++j) m.c(j) = rem[static_cast<size_t>(j)];
    m.d = d;
    return m;
}

std::pair<Eigen::VectorXd, double> lti_step(const StateSpace& m,
                                            const Eigen::VectorXd& x, double u) {
    if (x.size() != m.a.rows())
        throw std::invalid_argument("lti_step: state/model dimension mismatch");
    const double y = m.c.dot(x) + m.d * u;
    Eigen::VectorXd xn = m.a * x + m.b * u;
    return {std::move(xn), y};
}

double dc_gain(const StateSpace& m) {
    const int n = m.order();
    const Eigen::MatrixXd ima = Eigen::MatrixXd::Identity(n, n) - m.a;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ima);
    if (!lu.isInvertible())
        throw std::domain_error("dc_gain: system has a pole at z = 1");
    return m.c.dot(lu.solve(m.b)) + m.d;
}

}  // namespace pmsim
