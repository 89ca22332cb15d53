#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rande/grid.hpp"

namespace rande {

// dy/dt = f(t, y); the callback writes the derivative into dydt (same length
// as y) and must not reallocate or retain the spans.
using OdeRhs = std::function<void(double t, std::span<const double> y,
                                  std::span<double> dydt)>;

struct OdeTols {
    double rel = 1e-6;
    double abs = 1e-9;
};

// Thrown when the step size underflows (stiffness or a non-finite right-hand
// side); carries the last time the integrator had a valid state for.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double t_last)
        : std::runtime_error(what), t_last_(t_last) {}
    double t_last() const { return t_last_; }

private:
    double t_last_;
};

// State trajectory sampled on a time grid; row j is the state at time.t(j).
struct Trajectory {
    TimeGrid time;
    std::size_t dim = 0;
    std::vector<double> values;  // time.n_points * dim, row-major

    std::span<const double> row(std::size_t j) const {
        return {values.data() + j * dim, dim};
    }
    std::span<double> row(std::size_t j) {
        return {values.data() + j * dim, dim};
    }
};

// Dormand-Prince 5(4) embedded pair with PI step-size control. Output rows
// are produced by the method's 4th-order dense interpolant, so every sample
// is tolerance-controlled rather than post-interpolated. max_step = 0 means
// unrestricted. Throws SolverFailure when the step drops below 1e-12 of the
// integration span.
Trajectory integrate_adaptive(const OdeRhs& rhs, std::span<const double> y0,
                              const TimeGrid& time, OdeTols tols = {},
                              double max_step = 0.0);

// Same pair stepped with a fixed step h (each output interval is split into
// equal substeps no longer than h). No error control; used for step-size
// studies and as a fallback when adaptivity is not wanted.
Trajectory integrate_fixed_step(const OdeRhs& rhs, std::span<const double> y0,
                                const TimeGrid& time, double h);

}  // namespace rande
