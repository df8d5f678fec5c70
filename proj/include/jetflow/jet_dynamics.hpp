#ifndef JETFLOW_JET_DYNAMICS_HPP
#define JETFLOW_JET_DYNAMICS_HPP

#include <optional>
#include <vector>

#include "jetflow/chart.hpp"
#include "jetflow/expr.hpp"
#include "jetflow/sampling.hpp"

namespace jetflow {

// ============================================================================
// Types
// ============================================================================

// A second order dynamic equation q^i_tt = xi^i(t, q, v) on the configuration
// bundle.
struct DynamicEquation {
    int dim = 0;
    std::vector<ScalarField> xi;

    DynamicEquation() = default;
    explicit DynamicEquation(std::vector<ScalarField> components);

    static DynamicEquation zero(int dim);
};

// A connection on the affine jet bundle, with one time component gamma0^i and
// the spatial block gamma[i][j] = gamma^i_j, all fields in (t, q, v).
struct DynamicConnection {
    int dim = 0;
    std::vector<ScalarField> gamma0;
    std::vector<std::vector<ScalarField>> gamma;

    DynamicConnection() = default;
    DynamicConnection(std::vector<ScalarField> g0, std::vector<std::vector<ScalarField>> gj);

    static DynamicConnection zero(int dim);
};

// Velocity-affine connection: gamma^i_lambda = coeffs[i][lambda][0]
// + coeffs[i][lambda][j] v^j with velocity-free coefficients (lambda, second
// index in 0..m).
struct AffineDynamicConnection {
    int dim = 0;
    std::vector<std::vector<std::vector<ScalarField>>> coeffs;

    AffineDynamicConnection() = default;
    AffineDynamicConnection(int dim, std::vector<std::vector<std::vector<ScalarField>>> c);

    DynamicConnection to_connection() const;
};

// Velocity-quadratic dynamic equation
// xi^i = a^i_jk(t,q) v^j v^k + b^i_j(t,q) v^j + f^i(t,q), a symmetric in jk.
struct QuadraticSODE {
    int dim = 0;
    std::vector<std::vector<std::vector<ScalarField>>> a;
    std::vector<std::vector<ScalarField>> b;
    std::vector<ScalarField> f;

    DynamicEquation to_equation() const;
};

struct QuadraticExtraction {
    bool quadratic = false;
    double max_third_vertical_derivative = 0.0;
    std::optional<QuadraticSODE> value;
};

// Symbolic vector field on the velocity phase space, used by the projector
// route below and by tests.
struct JetVectorField {
    int dim = 0;
    ScalarField ct;
    std::vector<ScalarField> cq;
    std::vector<ScalarField> cv;
};

JetVectorField lie_bracket(const JetVectorField& x, const JetVectorField& y);

// The canonical vertical endomorphism: d/dt -> -v^i d/dv^i, d/dq^i -> d/dv^i,
// d/dv^i -> 0, extended over field coefficients.
JetVectorField vertical_endomorphism(const JetVectorField& x);

// ============================================================================
// Operations
// ============================================================================

// xi^i = gamma0^i + v^j gamma^i_j: the dynamic equation a connection induces.
DynamicEquation sode_from_connection(const DynamicConnection& g);

// The symmetric dynamic connection of a dynamic equation:
// gamma^i_j = 1/2 dxi^i/dv^j, gamma0^i = xi^i - v^j gamma^i_j.
DynamicConnection connection_from_sode(const DynamicEquation& eq);

// Connection associated with the induced equation; a fixed point exactly on
// symmetric inputs, and always SODE-preserving.
DynamicConnection resymmetrize(const DynamicConnection& g);

// Sampled test of dv_j gamma^k_i = dv_i gamma^k_j.
struct SymmetryCheck {
    bool symmetric = false;
    double max_residual = 0.0;
};
SymmetryCheck check_symmetry(const DynamicConnection& g, Sampler& sampler, int count = 200,
                             const SampleBox& box = {}, double tol = 1e-9);

// Sampled test of gamma^i_{lambda mu} = gamma^i_{mu lambda}.
SymmetryCheck check_symmetry(const AffineDynamicConnection& g, Sampler& sampler,
                             int count = 200, const SampleBox& box = {}, double tol = 1e-9);

// Transformation of a dynamic equation under a time-preserving chart change,
// re-expressed in the primed variables.
DynamicEquation transform_sode(const DynamicEquation& eq, const ChartTransform& chart);

// Transformation of a dynamic connection under a chart change.
DynamicConnection transform_connection(const DynamicConnection& g, const ChartTransform& chart);

// Builds the connection of a dynamic equation through the projector route
// (bracket with the vertical endomorphism); an independent cross-check of
// connection_from_sode.
DynamicConnection vhat_oracle(const DynamicEquation& eq);

// Extracts quadratic coefficients, or reports non-quadratic when any third
// vertical derivative exceeds tol on samples.
QuadraticExtraction as_quadratic(const DynamicEquation& eq, Sampler& sampler, int count = 200,
                                 const SampleBox& box = {}, double tol = 1e-9);

// Velocity-affine test and extraction (second vertical derivatives vanish).
std::optional<AffineDynamicConnection> as_affine(const DynamicConnection& g, Sampler& sampler,
                                                 int count = 200, const SampleBox& box = {},
                                                 double tol = 1e-9);

// Largest sampled deviation between two equations / connections.
double max_difference(const DynamicEquation& a, const DynamicEquation& b, Sampler& sampler,
                      int count = 200, const SampleBox& box = {});
double max_difference(const DynamicConnection& a, const DynamicConnection& b, Sampler& sampler,
                      int count = 200, const SampleBox& box = {});

}  // namespace jetflow

#endif
