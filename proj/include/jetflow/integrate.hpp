#ifndef JETFLOW_INTEGRATE_HPP
#define JETFLOW_INTEGRATE_HPP

#include <functional>
#include <string>
#include <vector>

#include "jetflow/jet_dynamics.hpp"
#include "jetflow/tangent.hpp"

namespace jetflow {

enum class IntegratorMethod { RK4Fixed, RK45Adaptive };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::RK45Adaptive;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double max_step = 0.1;
    double window = 5.0;
};

enum class TrajectoryStatus { Complete, StepFailure };

struct TrajectorySample {
    double t = 0.0;
    std::vector<double> state;
    std::vector<double> deriv;
};

// An integrated curve with dense output. Samples carry the state derivative,
// so values between nodes come from cubic Hermite interpolation.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    TrajectoryStatus status = TrajectoryStatus::Complete;
    std::string integrator;
    double abs_tol = 0.0;
    double rel_tol = 0.0;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
    std::vector<std::string> columns;  // param column first

    double t_front() const;
    double t_back() const;
    std::vector<double> state_at(double t) const;
};

// Right-hand side: writes dy into `out`; may throw DomainError.
using OdeRhs = std::function<void(double t, const std::vector<double>& y,
                                  std::vector<double>& out)>;

// Generic driver. RK45 is the Dormand-Prince 5(4) embedded pair with FSAL;
// RK4 takes fixed steps of size max_step (last step clipped). A mid-run
// domain failure or step underflow ends the trajectory with StepFailure and
// keeps the partial data.
Trajectory integrate_ode(const OdeRhs& rhs, double t0, std::vector<double> y0,
                         const IntegratorConfig& cfg);

// Flow of the dynamic equation: state (q^1..q^m, v^1..v^m).
Trajectory integrate_sode(const DynamicEquation& eq, const JetPoint& p0,
                          const IntegratorConfig& cfg);

// Flow of the geodesic equation: state (x^0..x^m, xdot^0..xdot^m), with the
// curve parameter as the independent variable.
Trajectory integrate_geodesic(const TangentConnection& k, const TangentPoint& p0,
                              const IntegratorConfig& cfg);

// Maps a sample to (comparison time, compared values).
struct TrajectoryProjection {
    std::function<double(double t, const std::vector<double>& state)> time;
    std::function<std::vector<double>(double t, const std::vector<double>& state)> value;
};

TrajectoryProjection sode_projection(int m);            // (q, v) against param time
TrajectoryProjection sode_position_projection(int m);   // q only
TrajectoryProjection geodesic_jet_projection(int m);    // (x^i, xdot^i) against x^0
TrajectoryProjection geodesic_position_projection(int m);

// Max norm of the projected difference over a uniform grid of common times.
// Projected times must be strictly increasing along each trajectory.
double compare_trajectories(const Trajectory& a, const TrajectoryProjection& pa,
                            const Trajectory& b, const TrajectoryProjection& pb,
                            int grid = 200);

}  // namespace jetflow

#endif
