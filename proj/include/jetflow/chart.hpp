#ifndef JETFLOW_CHART_HPP
#define JETFLOW_CHART_HPP

#include <vector>

#include "jetflow/expr.hpp"
#include "jetflow/sampling.hpp"

namespace jetflow {

// A time-preserving change of bundle coordinates
//
//   t' = t + time_shift,   q'^i = forward^i(t, q),
//
// with the user-supplied inverse q^i = inverse^i(t', q'). The inverse
// components are written in the same symbols (t, q1..qm), read as the primed
// variables. Transition functions never involve velocities.
struct ChartTransform {
    int dim = 0;
    std::vector<ScalarField> forward;
    std::vector<ScalarField> inverse;
    double time_shift = 0.0;

    ChartTransform() = default;
    ChartTransform(std::vector<ScalarField> fwd, std::vector<ScalarField> inv,
                   double shift = 0.0);

    static ChartTransform identity(int dim);
};

// The transform in the opposite direction (roles of forward/inverse swapped).
ChartTransform inverse_chart(const ChartTransform& chart);

// Spatial Jacobian d forward^i / d q^j at a point; throws SingularJacobian
// when |det| < 1e-12.
std::vector<std::vector<double>> chart_jacobian(const ChartTransform& chart, double t,
                                                const std::vector<double>& q);

// Jet-coordinate push-forward: q'^i_t = d_t q'^i = d q'^i/dt + v^j d q'^i/dq^j.
JetPoint pushforward_jet(const ChartTransform& chart, const JetPoint& p);

// Tangent-coordinate push-forward (xdot'^0 = xdot^0, xdot'^i linear in xdot).
TangentPoint pushforward_tangent(const ChartTransform& chart, const TangentPoint& p);

// Re-expresses a field on the velocity phase space, written in unprimed
// variables, as a field in the primed variables (t -> t' - shift, q -> inverse,
// v -> d_t inverse).
ScalarField pullback_jet_field(const ChartTransform& chart, const ScalarField& f);

// Same for a field on the tangent bundle, where velocities transform linearly
// and the xdot0 slot is chart-invariant.
ScalarField pullback_tangent_field(const ChartTransform& chart, const ScalarField& f);

// Round-trip and Jacobian diagnostics over sampled points.
struct ChartValidation {
    double max_round_trip_error = 0.0;
    double min_abs_jacobian_det = 0.0;
};
ChartValidation validate_chart(const ChartTransform& chart, Sampler& sampler, int count,
                               const SampleBox& box = {});

}  // namespace jetflow

#endif
