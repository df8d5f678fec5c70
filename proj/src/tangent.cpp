#include "jetflow/tangent.hpp"

#include <cmath>

namespace jetflow {

namespace {

void check_tangent_matrix(int dim, const std::vector<std::vector<ScalarField>>& K) {
    if (static_cast<int>(K.size()) != dim + 1)
        throw DimensionMismatch("tangent connection needs (m+1) x (m+1) components");
    for (const auto& row : K) {
        if (static_cast<int>(row.size()) != dim + 1)
            throw DimensionMismatch("tangent connection needs (m+1) x (m+1) components");
        for (const auto& f : row)
            if (f.dim() != dim) throw DimensionMismatch("component dimension mismatch");
    }
}

ScalarField xdot_component(int dim, int lambda) {
    return lambda == 0 ? ScalarField::velocity_time(dim) : ScalarField::velocity(dim, lambda);
}

Sym coord_sym(int lambda) { return lambda == 0 ? sym_t() : sym_q(lambda); }

}  // namespace

// ============================================================================
// Types
// ============================================================================

TangentConnection::TangentConnection(int dim_, std::vector<std::vector<ScalarField>> components)
    : dim(dim_), K(std::move(components)) {
    if (dim < 1) throw DimensionMismatch("tangent connection needs fibre dimension >= 1");
    check_tangent_matrix(dim, K);
}

TangentConnection TangentConnection::zero(int dim) {
    std::vector<std::vector<ScalarField>> K(
        dim + 1, std::vector<ScalarField>(dim + 1, ScalarField::constant(dim, 0.0)));
    return TangentConnection(dim, std::move(K));
}

LinearTangentConnection::LinearTangentConnection(
    int dim_, std::vector<std::vector<std::vector<ScalarField>>> c)
    : dim(dim_), coeffs(std::move(c)) {
    if (dim < 1) throw DimensionMismatch("linear connection needs fibre dimension >= 1");
    if (static_cast<int>(coeffs.size()) != dim + 1)
        throw DimensionMismatch("linear connection needs (m+1)^3 coefficients");
    for (const auto& block : coeffs) {
        if (static_cast<int>(block.size()) != dim + 1)
            throw DimensionMismatch("linear connection needs (m+1)^3 coefficients");
        for (const auto& row : block) {
            if (static_cast<int>(row.size()) != dim + 1)
                throw DimensionMismatch("linear connection needs (m+1)^3 coefficients");
            for (const auto& f : row)
                if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
                    throw DimensionMismatch("linear coefficients must be velocity-free");
        }
    }
}

LinearTangentConnection LinearTangentConnection::zero(int dim) {
    std::vector<std::vector<std::vector<ScalarField>>> c(
        dim + 1, std::vector<std::vector<ScalarField>>(
                     dim + 1, std::vector<ScalarField>(dim + 1, ScalarField::constant(dim, 0.0))));
    return LinearTangentConnection(dim, std::move(c));
}

TangentConnection LinearTangentConnection::to_tangent_connection() const {
    std::vector<std::vector<ScalarField>> K(dim + 1);
    for (int alpha = 0; alpha <= dim; ++alpha)
        for (int mu = 0; mu <= dim; ++mu) {
            ScalarField e = ScalarField::constant(dim, 0.0);
            for (int nu = 0; nu <= dim; ++nu)
                e = e + coeffs[mu][alpha][nu] * xdot_component(dim, nu);
            K[alpha].push_back(e);
        }
    return TangentConnection(dim, std::move(K));
}

ManifoldSODE::ManifoldSODE(std::vector<ScalarField> components)
    : n(static_cast<int>(components.size())), Xi(std::move(components)) {
    if (n < 1) throw DimensionMismatch("manifold equation needs at least one coordinate");
    for (const auto& f : Xi) {
        if (f.dim() != n) throw DimensionMismatch("component dimension mismatch");
        if (f.depends_on(SymKind::Time) || f.depends_on(SymKind::VelTime))
            throw DimensionMismatch("manifold fields use coordinates q1..qn, v1..vn only");
    }
}

SolderingPatch::SolderingPatch(int dim_, std::vector<std::vector<ScalarField>> components)
    : dim(dim_), h(std::move(components)) {
    if (static_cast<int>(h.size()) != dim)
        throw DimensionMismatch("soldering patch needs m x (m+1) components");
    for (const auto& row : h) {
        if (static_cast<int>(row.size()) != dim + 1)
            throw DimensionMismatch("soldering patch needs m x (m+1) components");
        for (const auto& f : row)
            if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
                throw DimensionMismatch("soldering components must be velocity-free");
    }
}

// ============================================================================
// Variable conventions
// ============================================================================

ScalarField tangent_to_manifold_field(const ScalarField& f) {
    const int m = f.dim();
    SubstitutionMap subs;
    subs[sym_t()] = variable(sym_q(1));
    subs[sym_vt()] = variable(sym_v(1));
    for (int i = m; i >= 1; --i) {
        subs[sym_q(i)] = variable(sym_q(i + 1));
        subs[sym_v(i)] = variable(sym_v(i + 1));
    }
    return ScalarField(m + 1, substitute(f.ast(), subs));
}

ScalarField manifold_to_tangent_field(const ScalarField& f) {
    const int n = f.dim();
    if (n < 2) throw DimensionMismatch("need at least two manifold coordinates");
    if (f.depends_on(SymKind::Time) || f.depends_on(SymKind::VelTime))
        throw DimensionMismatch("not a manifold-convention field");
    SubstitutionMap subs;
    subs[sym_q(1)] = variable(sym_t());
    subs[sym_v(1)] = variable(sym_vt());
    for (int i = 2; i <= n; ++i) {
        subs[sym_q(i)] = variable(sym_q(i - 1));
        subs[sym_v(i)] = variable(sym_v(i - 1));
    }
    return ScalarField(n - 1, substitute(f.ast(), subs));
}

// ============================================================================
// Lifts and restrictions
// ============================================================================

TangentConnection lift_to_tangent(const DynamicConnection& g, LiftMode mode, Sampler& sampler) {
    const int m = g.dim;
    std::vector<std::vector<ScalarField>> K(m + 1);
    for (int lambda = 0; lambda <= m; ++lambda)
        K[0].push_back(ScalarField::constant(m, 0.0));

    if (mode == LiftMode::Substitution) {
        for (int i = 1; i <= m; ++i)
            for (int lambda = 0; lambda <= m; ++lambda)
                K[i].push_back(lambda == 0 ? g.gamma0[i - 1] : g.gamma[i - 1][lambda - 1]);
        return TangentConnection(m, std::move(K));
    }

    auto affine = as_affine(g, sampler);
    if (!affine)
        throw NotAffine("linear lift requested for a connection that is not velocity-affine");
    for (int i = 1; i <= m; ++i)
        for (int lambda = 0; lambda <= m; ++lambda) {
            ScalarField e = ScalarField::constant(m, 0.0);
            for (int mu = 0; mu <= m; ++mu)
                e = e + affine->coeffs[i - 1][lambda][mu] * xdot_component(m, mu);
            K[i].push_back(e);
        }
    return TangentConnection(m, std::move(K));
}

DynamicConnection restrict_to_jet(const TangentConnection& k) {
    SubstitutionMap slice;
    slice[sym_vt()] = constant(1.0);
    std::vector<ScalarField> g0;
    std::vector<std::vector<ScalarField>> gj(k.dim);
    for (int i = 1; i <= k.dim; ++i) {
        g0.push_back(k.K[i][0].substitute(slice));
        for (int l = 1; l <= k.dim; ++l) gj[i - 1].push_back(k.K[i][l].substitute(slice));
    }
    return DynamicConnection(std::move(g0), std::move(gj));
}

ManifoldSODE geodesic_field(const TangentConnection& k) {
    std::vector<ScalarField> Xi;
    for (int mu = 0; mu <= k.dim; ++mu) {
        ScalarField e = ScalarField::constant(k.dim, 0.0);
        for (int lambda = 0; lambda <= k.dim; ++lambda)
            e = e + k.K[mu][lambda] * xdot_component(k.dim, lambda);
        Xi.push_back(tangent_to_manifold_field(e));
    }
    return ManifoldSODE(std::move(Xi));
}

ManifoldDecomposition sode_connection_on_manifold(const ManifoldSODE& xi) {
    const int n = xi.n;
    ManifoldDecomposition out;
    out.n = n;
    out.K.resize(n);
    for (int mu = 0; mu < n; ++mu)
        for (int lambda = 1; lambda <= n; ++lambda)
            out.K[mu].push_back(0.5 * xi.Xi[mu].partial(sym_v(lambda)));
    for (int mu = 0; mu < n; ++mu) {
        ScalarField e = xi.Xi[mu];
        for (int lambda = 1; lambda <= n; ++lambda)
            e = e - ScalarField::velocity(n, lambda) * out.K[mu][lambda - 1];
        out.e.push_back(e);
    }
    return out;
}

double spray_residual(const ManifoldSODE& xi, Sampler& sampler, int count,
                      const SampleBox& box) {
    double worst = 0.0;
    for (int mu = 0; mu < xi.n; ++mu) {
        ScalarField e = -2.0 * xi.Xi[mu];
        for (int beta = 1; beta <= xi.n; ++beta)
            e = e + ScalarField::velocity(xi.n, beta) * xi.Xi[mu].partial(sym_v(beta));
        worst = std::max(worst, max_value(e, sampler, count, box));
    }
    return worst;
}

// ============================================================================
// Quadratic equations, soldering, curvature
// ============================================================================

LinearTangentConnection quadratic_to_linear(const QuadraticSODE& qs) {
    const int m = qs.dim;
    auto L = LinearTangentConnection::zero(m);
    for (int i = 1; i <= m; ++i) {
        L.coeffs[0][i][0] = qs.f[i - 1];
        for (int j = 1; j <= m; ++j) {
            L.coeffs[0][i][j] = 0.5 * qs.b[i - 1][j - 1];
            L.coeffs[j][i][0] = 0.5 * qs.b[i - 1][j - 1];
            for (int k = 1; k <= m; ++k) L.coeffs[k][i][j] = qs.a[i - 1][k - 1][j - 1];
        }
    }
    return L;
}

TangentConnection soldering_alternative(const LinearTangentConnection& linear,
                                        const SolderingPatch& patch) {
    if (linear.dim != patch.dim) throw DimensionMismatch("connection/patch dimension mismatch");
    const int m = linear.dim;
    TangentConnection out = linear.to_tangent_connection();
    const ScalarField xdot0 = ScalarField::velocity_time(m);
    for (int i = 1; i <= m; ++i) {
        ScalarField sigma0 = patch.h[i - 1][0] - patch.h[i - 1][0] * xdot0;
        for (int k = 1; k <= m; ++k) {
            sigma0 = sigma0 - 0.5 * patch.h[i - 1][k] * ScalarField::velocity(m, k);
            out.K[i][k] = out.K[i][k] + patch.h[i - 1][k] - 0.5 * patch.h[i - 1][k] * xdot0;
        }
        out.K[i][0] = out.K[i][0] + sigma0;
    }
    return out;
}

CurvatureTensor curvature(const LinearTangentConnection& linear) {
    const int m = linear.dim;
    CurvatureTensor out;
    out.dim = m;
    out.R.assign(m + 1, std::vector<std::vector<std::vector<ScalarField>>>(
                            m + 1, std::vector<std::vector<ScalarField>>(
                                       m + 1, std::vector<ScalarField>(
                                                  m + 1, ScalarField::constant(m, 0.0)))));
    for (int lambda = 0; lambda <= m; ++lambda)
        for (int mu = 0; mu <= m; ++mu)
            for (int alpha = 0; alpha <= m; ++alpha)
                for (int nu = 0; nu <= m; ++nu) {
                    ScalarField r = linear.coeffs[mu][alpha][nu].partial(coord_sym(lambda)) -
                                    linear.coeffs[lambda][alpha][nu].partial(coord_sym(mu));
                    for (int beta = 0; beta <= m; ++beta)
                        r = r +
                            linear.coeffs[lambda][beta][nu] * linear.coeffs[mu][alpha][beta] -
                            linear.coeffs[mu][beta][nu] * linear.coeffs[lambda][alpha][beta];
                    out.R[lambda][mu][alpha][nu] = r;
                }
    return out;
}

FreeMotionReport is_free_motion_candidate(const DynamicEquation& eq, Sampler& sampler,
                                          const SampleBox& box) {
    FreeMotionReport report;
    QuadraticExtraction extraction = as_quadratic(eq, sampler, 200, box);
    report.quadratic = extraction.quadratic;
    report.max_third_vertical_derivative = extraction.max_third_vertical_derivative;
    if (!extraction.quadratic) return report;

    CurvatureTensor R = curvature(quadratic_to_linear(*extraction.value));
    double worst = 0.0;
    for (const auto& a : R.R)
        for (const auto& b : a)
            for (const auto& c : b)
                for (const auto& f : c)
                    worst = std::max(worst, max_value(f, sampler, 500, box));
    report.max_curvature = worst;
    report.flat = worst < 1e-8;
    report.candidate = report.quadratic && report.flat;
    return report;
}

// ============================================================================
// Frame shifts and fibre lifts
// ============================================================================

TangentConnection frame_shift(const TangentConnection& k,
                              const std::vector<ScalarField>& frame_components) {
    const int m = k.dim;
    if (static_cast<int>(frame_components.size()) != m)
        throw DimensionMismatch("frame/connection dimension mismatch");
    std::vector<std::vector<ScalarField>> K(m + 1);
    for (int lambda = 0; lambda <= m; ++lambda) K[0].push_back(ScalarField::constant(m, 0.0));
    for (int i = 1; i <= m; ++i)
        for (int lambda = 0; lambda <= m; ++lambda)
            K[i].push_back(k.K[i][lambda] - frame_components[i - 1] * k.K[0][lambda]);
    return TangentConnection(m, std::move(K));
}

DynamicEquation dynamic_equation_from_tangent(const TangentConnection& k,
                                              const std::vector<ScalarField>& frame_components) {
    const TangentConnection shifted = frame_shift(k, frame_components);
    const int m = k.dim;
    SubstitutionMap slice;
    slice[sym_vt()] = constant(1.0);
    std::vector<ScalarField> xi;
    for (int i = 1; i <= m; ++i) {
        ScalarField e = ScalarField::constant(m, 0.0);
        for (int lambda = 0; lambda <= m; ++lambda)
            e = e + shifted.K[i][lambda] * xdot_component(m, lambda);
        xi.push_back(e.substitute(slice));
    }
    return DynamicEquation(std::move(xi));
}

DynamicConnection lift_fibre_connection(const std::vector<std::vector<ScalarField>>& kbar) {
    const int m = static_cast<int>(kbar.size());
    if (m < 1) throw DimensionMismatch("fibre connection needs dimension >= 1");
    for (const auto& row : kbar) {
        if (static_cast<int>(row.size()) != m)
            throw DimensionMismatch("fibre connection must be m x m");
        for (const auto& f : row) {
            if (f.depends_on(SymKind::Time) || f.depends_on(SymKind::VelTime))
                throw DimensionMismatch("fibre connection components must be time-independent");
            if (f.dim() != m) throw DimensionMismatch("component dimension mismatch");
        }
    }
    std::vector<ScalarField> g0(m, ScalarField::constant(m, 0.0));
    return DynamicConnection(std::move(g0), kbar);
}

// ============================================================================
// Chart transformation
// ============================================================================

TangentConnection transform_tangent_connection(const TangentConnection& k,
                                               const ChartTransform& chart) {
    const int m = k.dim;
    if (chart.dim != m) throw DimensionMismatch("chart/connection dimension mismatch");

    // xdot'^mu as fields on the unprimed tangent bundle.
    std::vector<ScalarField> xdot_primed;
    xdot_primed.push_back(ScalarField::velocity_time(m));
    for (int i = 1; i <= m; ++i) {
        ScalarField e =
            chart.forward[i - 1].partial(sym_t()) * ScalarField::velocity_time(m);
        for (int j = 1; j <= m; ++j)
            e = e + chart.forward[i - 1].partial(sym_q(j)) * ScalarField::velocity(m, j);
        xdot_primed.push_back(e);
    }

    auto dq_primed = [&](int mu, int nu) {
        // d q'^mu / d q^nu with q'^0 = t + shift
        if (mu == 0) return ScalarField::constant(m, nu == 0 ? 1.0 : 0.0);
        return chart.forward[mu - 1].partial(coord_sym(nu));
    };

    // Bracket term in unprimed variables, pulled back to the primed chart.
    std::vector<std::vector<ScalarField>> bracket(m + 1);
    for (int mu = 0; mu <= m; ++mu)
        for (int alpha = 0; alpha <= m; ++alpha) {
            ScalarField e = xdot_primed[mu].partial(coord_sym(alpha));
            for (int nu = 0; nu <= m; ++nu) e = e + dq_primed(mu, nu) * k.K[nu][alpha];
            bracket[mu].push_back(pullback_tangent_field(chart, e));
        }

    std::vector<std::vector<ScalarField>> K(m + 1);
    for (int mu = 0; mu <= m; ++mu) {
        // lambda = 0: dq^0/dq'^0 = 1, dq^k/dq'^0 = d inverse^k / dt'
        ScalarField c0 = bracket[mu][0];
        for (int kk = 1; kk <= m; ++kk)
            c0 = c0 + bracket[mu][kk] * chart.inverse[kk - 1].partial(sym_t());
        K[mu].push_back(c0);
        for (int l = 1; l <= m; ++l) {
            ScalarField cl = ScalarField::constant(m, 0.0);
            for (int kk = 1; kk <= m; ++kk)
                cl = cl + bracket[mu][kk] * chart.inverse[kk - 1].partial(sym_q(l));
            K[mu].push_back(cl);
        }
    }
    return TangentConnection(m, std::move(K));
}

// ============================================================================
// Sampled diagnostics
// ============================================================================

double temporal_triviality_residual(const TangentConnection& k, Sampler& sampler, int count,
                                    const SampleBox& box) {
    double worst = 0.0;
    for (int lambda = 0; lambda <= k.dim; ++lambda)
        worst = std::max(worst, max_value(k.K[0][lambda], sampler, count, box));
    return worst;
}

double linear_symmetry_residual(const LinearTangentConnection& linear, Sampler& sampler,
                                int count, const SampleBox& box) {
    double worst = 0.0;
    for (int alpha = 0; alpha <= linear.dim; ++alpha)
        for (int mu = 0; mu <= linear.dim; ++mu)
            for (int nu = mu + 1; nu <= linear.dim; ++nu)
                worst = std::max(worst,
                                 jetflow::max_difference(linear.coeffs[mu][alpha][nu],
                                                         linear.coeffs[nu][alpha][mu], sampler,
                                                         count, box));
    return worst;
}

double max_difference(const TangentConnection& a, const TangentConnection& b, Sampler& sampler,
                      int count, const SampleBox& box) {
    if (a.dim != b.dim) throw DimensionMismatch("connection dimension mismatch");
    double worst = 0.0;
    for (int mu = 0; mu <= a.dim; ++mu)
        for (int lambda = 0; lambda <= a.dim; ++lambda)
            worst = std::max(
                worst, jetflow::max_difference(a.K[mu][lambda], b.K[mu][lambda], sampler, count, box));
    return worst;
}

}  // namespace jetflow
