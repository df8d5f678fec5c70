#ifndef JETFLOW_TANGENT_HPP
#define JETFLOW_TANGENT_HPP

#include <optional>
#include <vector>

#include "jetflow/jet_dynamics.hpp"

namespace jetflow {

// ============================================================================
// Types
// ============================================================================

// A (generally non-linear) connection on the tangent bundle of the
// configuration space, with components K[mu][lambda] = K^mu_lambda(x, xdot).
// Fields use the tangent-bundle variable convention: t = x^0, q^i = x^i,
// xdot0 = xdot^0, v^i = xdot^i.
struct TangentConnection {
    int dim = 0;  // fibre dimension m; indices run over 0..m
    std::vector<std::vector<ScalarField>> K;

    TangentConnection() = default;
    TangentConnection(int dim, std::vector<std::vector<ScalarField>> components);

    static TangentConnection zero(int dim);
};

// Linear connection with velocity-free coefficients coeffs[mu][alpha][nu]
// = K_mu^alpha_nu(x); its non-linear components are K^alpha_mu
// = coeffs[mu][alpha][nu] xdot^nu.
struct LinearTangentConnection {
    int dim = 0;
    std::vector<std::vector<std::vector<ScalarField>>> coeffs;

    LinearTangentConnection() = default;
    LinearTangentConnection(int dim, std::vector<std::vector<std::vector<ScalarField>>> c);

    static LinearTangentConnection zero(int dim);

    TangentConnection to_tangent_connection() const;
};

// A second order equation on a plain manifold with coordinates x^1..x^n and
// no distinguished time. Component fields depend on (q1..qn, v1..vn) in the
// manifold convention.
struct ManifoldSODE {
    int n = 0;
    std::vector<ScalarField> Xi;

    ManifoldSODE() = default;
    explicit ManifoldSODE(std::vector<ScalarField> components);
};

// Local soldering data h^i_lambda(x) (velocity-free) for the alternative
// geodesic extension of a quadratic equation.
struct SolderingPatch {
    int dim = 0;
    std::vector<std::vector<ScalarField>> h;  // h[i][lambda], lambda in 0..m

    SolderingPatch() = default;
    SolderingPatch(int dim, std::vector<std::vector<ScalarField>> components);
};

// Curvature components R[lambda][mu][alpha][nu](x) of a linear connection.
struct CurvatureTensor {
    int dim = 0;
    std::vector<std::vector<std::vector<std::vector<ScalarField>>>> R;
};

enum class LiftMode { Substitution, LinearIfAffine };

struct FreeMotionReport {
    bool quadratic = false;
    double max_third_vertical_derivative = 0.0;
    bool flat = false;
    double max_curvature = 0.0;
    bool candidate = false;
};

// ============================================================================
// Variable conventions
// ============================================================================

// Renames a tangent-bundle field (t, q^i, xdot0, v^i) to the pure manifold
// convention of an (m+1)-coordinate manifold (q1 = x^0, ..., v1 = xdot^0, ...).
ScalarField tangent_to_manifold_field(const ScalarField& f);

// Inverse renaming; requires the manifold field to have dimension >= 2.
ScalarField manifold_to_tangent_field(const ScalarField& f);

// ============================================================================
// Operations
// ============================================================================

// Extends a dynamic connection to a temporally trivial tangent-bundle
// connection. Substitution mode reuses the components verbatim (xdot0
// independent); linear mode requires a velocity-affine input and produces the
// bilinear extension. Both agree on the affine slice xdot0 = 1.
TangentConnection lift_to_tangent(const DynamicConnection& g, LiftMode mode, Sampler& sampler);

// Restriction of the spatial components to the slice xdot0 = 1, v = v.
DynamicConnection restrict_to_jet(const TangentConnection& k);

// The geodesic field Xi^mu = K^mu_lambda xdot^lambda, in manifold convention.
ManifoldSODE geodesic_field(const TangentConnection& k);

// Connection and vertical remainder of a manifold second order equation:
// K^mu_lambda = 1/2 d Xi^mu / d xdot^lambda, e^mu = Xi^mu - K^mu_lambda
// xdot^lambda; Xi = K xdot + e identically.
struct ManifoldDecomposition {
    int n = 0;
    std::vector<std::vector<ScalarField>> K;  // manifold convention
    std::vector<ScalarField> e;
};
ManifoldDecomposition sode_connection_on_manifold(const ManifoldSODE& xi);

// Sampled residual of the spray (quadratic homogeneity) criterion
// xdot^beta d Xi^alpha / d xdot^beta = 2 Xi^alpha.
double spray_residual(const ManifoldSODE& xi, Sampler& sampler, int count = 200,
                      const SampleBox& box = {});

// The symmetric linear connection of a quadratic dynamic equation:
// K_0^i_0 = f^i, K_0^i_j = K_j^i_0 = b^i_j / 2, K_k^i_j = a^i_kj, K_*^0_* = 0.
LinearTangentConnection quadratic_to_linear(const QuadraticSODE& qs);

// Adds the soldering form of a patch h to a linear connection; the geodesic
// equation on the slice xdot0 = 1 is unchanged.
TangentConnection soldering_alternative(const LinearTangentConnection& linear,
                                        const SolderingPatch& patch);

// Curvature of a linear connection, antisymmetric in the first index pair.
CurvatureTensor curvature(const LinearTangentConnection& linear);

// Necessary free-motion criterion: quadratic with flat associated linear
// connection. Uses 500 sample points and tolerance 1e-8 for flatness.
FreeMotionReport is_free_motion_candidate(const DynamicEquation& eq, Sampler& sampler,
                                          const SampleBox& box = {});

// Temporally trivial shift of an arbitrary tangent connection by a reference
// frame: Kt^0 = 0, Kt^i_lambda = K^i_lambda - Gamma^i K^0_lambda. Gamma
// components are velocity-free fields Gamma^i(t, q).
TangentConnection frame_shift(const TangentConnection& k,
                              const std::vector<ScalarField>& frame_components);

// The dynamic equation a tangent connection induces through a frame
// (restriction of the frame shift to the affine slice).
DynamicEquation dynamic_equation_from_tangent(const TangentConnection& k,
                                              const std::vector<ScalarField>& frame_components);

// Conservative dynamic connection from a connection on the typical fibre:
// gamma0 = 0, gamma^i_k = Kbar^i_k. Components must be time-independent.
DynamicConnection lift_fibre_connection(const std::vector<std::vector<ScalarField>>& kbar);

// Transformation law of a tangent-bundle connection under a time-preserving
// chart change.
TangentConnection transform_tangent_connection(const TangentConnection& k,
                                               const ChartTransform& chart);

// Sampled max |K^0_lambda|; zero for temporally trivial connections.
double temporal_triviality_residual(const TangentConnection& k, Sampler& sampler,
                                    int count = 200, const SampleBox& box = {});

// Sampled max |K_mu^alpha_nu - K_nu^alpha_mu|.
double linear_symmetry_residual(const LinearTangentConnection& linear, Sampler& sampler,
                                int count = 200, const SampleBox& box = {});

double max_difference(const TangentConnection& a, const TangentConnection& b, Sampler& sampler,
                      int count = 200, const SampleBox& box = {});

}  // namespace jetflow

#endif
