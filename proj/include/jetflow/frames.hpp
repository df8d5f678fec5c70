#ifndef JETFLOW_FRAMES_HPP
#define JETFLOW_FRAMES_HPP

#include <vector>

#include "jetflow/integrate.hpp"
#include "jetflow/jet_dynamics.hpp"

namespace jetflow {

// A reference frame: a connection on the configuration bundle, i.e. the
// horizontal vector field d/dt + Gamma^i d/dq^i with velocity-free
// components.
struct ReferenceFrame {
    int dim = 0;
    std::vector<ScalarField> Gamma;

    ReferenceFrame() = default;
    explicit ReferenceFrame(std::vector<ScalarField> components);

    static ReferenceFrame rest(int dim);  // Gamma = 0
};

// The dynamic connection gamma_Gamma built from a dynamic connection and a
// frame (composite shift plus the frame's soldering form).
struct FrameConnection {
    ReferenceFrame frame;
    DynamicConnection connection;
};

// v^i - Gamma^i(t, q): the velocity relative to the frame.
std::vector<double> relative_velocity(const ReferenceFrame& frame, const JetPoint& p);

// Substitutes v := Gamma(t, q) into the velocity slots of a field
// ("composition with the frame section").
ScalarField compose_with_frame(const ScalarField& f, const ReferenceFrame& frame);

// gamma_Gamma^i_k = gamma^i_k + d_k Gamma^i - gamma^i_k o Gamma,
// gamma_Gamma^i_0 = d_t Gamma^i - gamma^i_k Gamma^k
//                   - Gamma^k (d_k Gamma^i - gamma^i_k o Gamma).
FrameConnection frame_connection(const DynamicConnection& g, const ReferenceFrame& frame);

// The holonomic lift of the frame through a dynamic connection:
// xi_Gamma^i = d_t Gamma^i + (d_k Gamma^i + gamma^i_k - gamma^i_k o Gamma)(v^k - Gamma^k).
DynamicEquation frame_lift(const DynamicConnection& g, const ReferenceFrame& frame);

// Relative acceleration a_Gamma = xi - xi_Gamma with gamma = gamma_xi.
std::vector<ScalarField> relative_acceleration(const DynamicEquation& eq,
                                               const ReferenceFrame& frame);

// Proper-coordinate shortcut, valid when Gamma = 0 in the working chart:
// a^i = xi^i - 1/2 v^k (dv_k xi^i - dv_k xi^i |_{v=0}).
std::vector<ScalarField> relative_acceleration_proper(const DynamicEquation& eq);

// Frame transformation under a chart change: Gamma'^i = d_t q'^i at v = Gamma,
// re-expressed in the primed variables.
ReferenceFrame transform_frame(const ReferenceFrame& frame, const ChartTransform& chart);

// Push-forward of a spatial (vertical) vector field a^j by the chart:
// a'^i = (dq'^i/dq^j) a^j in primed variables.
std::vector<ScalarField> pushforward_vertical(const std::vector<ScalarField>& a,
                                              const ChartTransform& chart);

// Constant-in-q extension of the velocity of an integrated motion into a
// frame: Gamma^i(t, q) := cdot^i(t), interpolated from the trajectory.
// Sampled at `knots` Chebyshev-like nodes and fit as a polynomial in t.
ReferenceFrame frame_from_motion(const Trajectory& motion, int dim, int knots = 12);

// Max over the trajectory of |d_t v^i (numeric) - xi_Gamma^i - a_Gamma^i|,
// the residual of the covariant form of the dynamic equation.
double vertical_covariant_residual(const DynamicEquation& eq, const ReferenceFrame& frame,
                                   const Trajectory& traj);

// Maps an integrated motion of `source` through a chart, with exact Hermite
// derivative data in the primed coordinates.
Trajectory pushforward_trajectory(const ChartTransform& chart, const Trajectory& traj,
                                  const DynamicEquation& source);

}  // namespace jetflow

#endif
