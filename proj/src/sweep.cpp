#include "pmsim/sweep.hpp"

#include <exception>

#include "pmsim/scenario.hpp"

namespace pmsim {

namespace {

std::pair<double, Metrics> run_point(const SimConfig& base, const std::string& path,
                                     double value) {
    SimConfig cfg = base;
    set_param(cfg, path, value);
    const Trace tr = simulate(cfg);
    return {value, compute_metrics(tr, cfg)};
}

}  // namespace

std::vector<std::pair<double, Metrics>> sweep_serial(const SimConfig& base,
                                                     const std::string& path,
                                                     const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");
    std::vector<std::pair<double, Metrics>> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(run_point(base, path, v));
    return out;
}

std::vector<std::pair<double, Metrics>> sweep_parallel(const SimConfig& base,
                                                       const std::string& path,
                                                       const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("sweep: empty value list");
    const long n = static_cast<long>(values.size());
    std::vector<std::pair<double, Metrics>> out(values.size());
    std::vector<std::exception_ptr> errors(values.size());

#ifdef PMSIM_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long i = 0; i < n; ++i) {
        try {
            out[static_cast<size_t>(i)] =
                run_point(base, path, values[static_cast<size_t>(i)]);
        } catch (...) {
            errors[static_cast<size_t>(i)] = std::current_exception();
        }
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace pmsim
