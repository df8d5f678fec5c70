#ifndef JETFLOW_RELATIVITY_HPP
#define JETFLOW_RELATIVITY_HPP

#include <optional>
#include <vector>

#include "jetflow/integrate.hpp"
#include "jetflow/tangent.hpp"

namespace jetflow {

// A pseudo-Riemannian metric on the configuration space, with velocity-free
// symmetric components g[lambda][mu](x), lambda, mu in 0..m and x^0 = t.
struct PseudoMetric {
    int dim = 0;
    std::vector<std::vector<ScalarField>> g;

    PseudoMetric() = default;
    PseudoMetric(int dim, std::vector<std::vector<ScalarField>> components);

    static PseudoMetric minkowski(int dim);  // diag(1, -1, ..., -1)

    double eval_entry(int lambda, int mu, const Point& p) const;

    // g_{lambda mu} xdot^lambda xdot^mu at a tangent point.
    double quadratic_form(const TangentPoint& p) const;
};

// L = 1/2 m_ij v^i v^j + k_i v^i + f with a Riemannian mass tensor.
struct QuadraticLagrangian {
    int dim = 0;
    std::vector<std::vector<ScalarField>> mass;
    std::vector<ScalarField> k;
    ScalarField f;

    QuadraticLagrangian() = default;
    QuadraticLagrangian(std::vector<std::vector<ScalarField>> mass_,
                        std::vector<ScalarField> k_, ScalarField f_);
};

// Lowered Christoffel symbols in the sign convention
// {lambda mu nu} = -1/2 (d_lambda g_{mu nu} + d_nu g_{mu lambda} - d_mu g_{lambda nu});
// symmetric in the outer pair.
std::vector<std::vector<std::vector<ScalarField>>> christoffel_lower(const PseudoMetric& g);

// The Levi-Civita connection as a linear tangent-bundle connection,
// coeffs[lambda][mu][nu] = g^{mu alpha} {lambda alpha nu}. Throws
// SingularMetric when the metric is degenerate on samples.
LinearTangentConnection levi_civita(const PseudoMetric& g, Sampler& sampler, int count = 200,
                                    const SampleBox& box = {});

// Metric of a quadratic Lagrangian: g_00 = -2f, g_0i = -k_i, g_ij = -m_ij.
// Degeneracy on the sampled box is reported, not rejected.
struct MetricFromLagrangian {
    PseudoMetric metric;
    bool degenerate = false;
    double min_abs_det = 0.0;
};
MetricFromLagrangian metric_from_lagrangian(const QuadraticLagrangian& lagrangian,
                                            Sampler& sampler, int count = 200,
                                            const SampleBox& box = {});

// The Lagrange equation of a quadratic Lagrangian as a dynamic equation:
// xi^i = -(mass^-1)^{ik} {lambda k nu} u^lambda u^nu at u^0 = 1.
DynamicEquation lagrange_sode(const QuadraticLagrangian& lagrangian, Sampler& sampler,
                              int count = 200, const SampleBox& box = {});

// The spatial geodesic equation of a metric restricted to the affine slice
// (the non-relativistic equation the metric induces).
DynamicEquation nonrelativistic_sode(const PseudoMetric& g, Sampler& sampler, int count = 200,
                                     const SampleBox& box = {});

// Max violation of the hyperboloid-preservation condition
// (d_lambda g_{mu nu} xdot^mu + 2 g_{mu nu} K^mu_lambda) xdot^lambda xdot^nu
// over sampled tangent vectors rescaled onto g(xdot, xdot) = 1. Points that
// cannot be rescaled are skipped; all-skipped raises NoHyperboloidPoint.
double hyperboloid_check(const TangentConnection& k, const PseudoMetric& g, Sampler& sampler,
                         int count = 200, const SampleBox& box = {});

// Lorentz-type relativization of a quadratic dynamic equation against a
// metric given in an adapted chart (g_0i = 0).
struct RelativizeResult {
    enum class Verdict { LorentzType, NotLorentzType, NotQuadraticResidual };
    Verdict verdict = Verdict::NotLorentzType;
    double max_symmetric_part = 0.0;          // lowered-force symmetry residual
    double max_second_vertical_derivative = 0.0;  // set for NotQuadraticResidual
    std::vector<std::vector<ScalarField>> force;  // force[i][mu], mu in 0..m
    std::optional<TangentConnection> connection;
    double hyperboloid_residual = 0.0;
};
RelativizeResult relativize(const QuadraticSODE& qs, const PseudoMetric& g, Sampler& sampler,
                            int count = 200, const SampleBox& box = {});

// Integrates the geodesic motion of the metric and the non-relativistic
// equation it induces from matched initial data (3-velocity = v_scale * u),
// and reports the largest position discrepancy at common coordinate times.
// relative_position_error is the discrepancy normalized by the position
// excursion of the non-relativistic motion, the quantity with O(v_scale^2)
// convergence.
struct LimitComparison {
    double v_scale = 0.0;
    double window = 0.0;
    double max_position_error = 0.0;
    double relative_position_error = 0.0;
};
LimitComparison nonrel_limit_compare(const PseudoMetric& g, const std::vector<double>& q0,
                                     const std::vector<double>& u, double v_scale,
                                     Sampler& sampler, const IntegratorConfig& cfg);

// Sampled min |det g| over the box.
double min_metric_determinant(const PseudoMetric& g, Sampler& sampler, int count = 200,
                              const SampleBox& box = {});

// Sampled max |g_{lambda mu} - g_{mu lambda}|.
double metric_symmetry_residual(const PseudoMetric& g, Sampler& sampler, int count = 200,
                                const SampleBox& box = {});

// True when the mass tensor is positive-definite at every sampled point
// (leading principal minors all positive).
bool mass_positive_definite(const QuadraticLagrangian& lagrangian, Sampler& sampler,
                            int count = 200, const SampleBox& box = {});

}  // namespace jetflow

#endif
