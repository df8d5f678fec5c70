#include "jetflow/relativity.hpp"

#include <cmath>

namespace jetflow {

namespace {

Sym coord_sym(int lambda) { return lambda == 0 ? sym_t() : sym_q(lambda); }

// --- symbolic cofactor determinant and inverse (small matrices) -------------

ExprPtr sym_det(const std::vector<std::vector<ExprPtr>>& a) {
    const int n = static_cast<int>(a.size());
    if (n == 1) return a[0][0];
    if (n == 2) return sub(mul(a[0][0], a[1][1]), mul(a[0][1], a[1][0]));
    ExprPtr out = constant(0.0);
    for (int j = 0; j < n; ++j) {
        std::vector<std::vector<ExprPtr>> minor;
        for (int r = 1; r < n; ++r) {
            std::vector<ExprPtr> row;
            for (int c = 0; c < n; ++c)
                if (c != j) row.push_back(a[r][c]);
            minor.push_back(std::move(row));
        }
        ExprPtr term = mul(a[0][j], sym_det(minor));
        out = (j % 2 == 0) ? add(out, term) : sub(out, term);
    }
    return out;
}

std::vector<std::vector<ExprPtr>> sym_inverse(const std::vector<std::vector<ExprPtr>>& a) {
    const int n = static_cast<int>(a.size());
    if (n > 5) throw DimensionMismatch("symbolic inverse limited to 5x5 matrices");
    ExprPtr det = sym_det(a);
    std::vector<std::vector<ExprPtr>> inv(n, std::vector<ExprPtr>(n));
    if (n == 1) {
        inv[0][0] = div(constant(1.0), det);
        return inv;
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<std::vector<ExprPtr>> minor;
            for (int r = 0; r < n; ++r) {
                if (r == j) continue;
                std::vector<ExprPtr> row;
                for (int c = 0; c < n; ++c)
                    if (c != i) row.push_back(a[r][c]);
                minor.push_back(std::move(row));
            }
            ExprPtr cof = sym_det(minor);
            if ((i + j) % 2 == 1) cof = neg(cof);
            inv[i][j] = div(cof, det);
        }
    return inv;
}

std::vector<std::vector<ExprPtr>> field_matrix(const std::vector<std::vector<ScalarField>>& m) {
    std::vector<std::vector<ExprPtr>> out;
    for (const auto& row : m) {
        std::vector<ExprPtr> r;
        for (const auto& f : row) r.push_back(f.ast());
        out.push_back(std::move(r));
    }
    return out;
}

void check_metric_like(int dim, const std::vector<std::vector<ScalarField>>& g, int n) {
    if (static_cast<int>(g.size()) != n) throw DimensionMismatch("metric component count");
    for (const auto& row : g) {
        if (static_cast<int>(row.size()) != n) throw DimensionMismatch("metric component count");
        for (const auto& f : row) {
            if (f.dim() != dim) throw DimensionMismatch("component dimension mismatch");
            if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
                throw DimensionMismatch("metric components must be velocity-free");
        }
    }
}

}  // namespace

// ============================================================================
// Types
// ============================================================================

PseudoMetric::PseudoMetric(int dim_, std::vector<std::vector<ScalarField>> components)
    : dim(dim_), g(std::move(components)) {
    if (dim < 1) throw DimensionMismatch("metric needs fibre dimension >= 1");
    check_metric_like(dim, g, dim + 1);
}

PseudoMetric PseudoMetric::minkowski(int dim) {
    std::vector<std::vector<ScalarField>> g(
        dim + 1, std::vector<ScalarField>(dim + 1, ScalarField::constant(dim, 0.0)));
    g[0][0] = ScalarField::constant(dim, 1.0);
    for (int i = 1; i <= dim; ++i) g[i][i] = ScalarField::constant(dim, -1.0);
    return PseudoMetric(dim, std::move(g));
}

double PseudoMetric::eval_entry(int lambda, int mu, const Point& p) const {
    return g[lambda][mu].eval(p);
}

double PseudoMetric::quadratic_form(const TangentPoint& p) const {
    const Point pt = to_point(p);
    double s = 0.0;
    for (int lambda = 0; lambda <= dim; ++lambda)
        for (int mu = 0; mu <= dim; ++mu)
            s += g[lambda][mu].eval(pt) * p.xdot[lambda] * p.xdot[mu];
    return s;
}

QuadraticLagrangian::QuadraticLagrangian(std::vector<std::vector<ScalarField>> mass_,
                                         std::vector<ScalarField> k_, ScalarField f_)
    : dim(static_cast<int>(mass_.size())), mass(std::move(mass_)), k(std::move(k_)), f(f_) {
    if (dim < 1) throw DimensionMismatch("Lagrangian needs fibre dimension >= 1");
    check_metric_like(dim, mass, dim);
    if (static_cast<int>(k.size()) != dim) throw DimensionMismatch("k component count");
    for (const auto& ki : k)
        if (ki.depends_on(SymKind::Vel) || ki.depends_on(SymKind::VelTime))
            throw DimensionMismatch("Lagrangian coefficients must be velocity-free");
    if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
        throw DimensionMismatch("Lagrangian coefficients must be velocity-free");
}

// ============================================================================
// Christoffel symbols and Levi-Civita connection
// ============================================================================

std::vector<std::vector<std::vector<ScalarField>>> christoffel_lower(const PseudoMetric& g) {
    const int n = g.dim + 1;
    std::vector<std::vector<std::vector<ScalarField>>> sym(
        n, std::vector<std::vector<ScalarField>>(
               n, std::vector<ScalarField>(n, ScalarField::constant(g.dim, 0.0))));
    for (int lambda = 0; lambda < n; ++lambda)
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
                sym[lambda][mu][nu] = -0.5 * (g.g[mu][nu].partial(coord_sym(lambda)) +
                                              g.g[mu][lambda].partial(coord_sym(nu)) -
                                              g.g[lambda][nu].partial(coord_sym(mu)));
    return sym;
}

double min_metric_determinant(const PseudoMetric& g, Sampler& sampler, int count,
                              const SampleBox& box) {
    const ExprPtr det = sym_det(field_matrix(g.g));
    const ScalarField det_field(g.dim, det);
    double lo = 1e300;
    int accepted = 0;
    for (int i = 0; i < count * 4 && accepted < count; ++i) {
        Point p = sampler.next_point(g.dim, box);
        try {
            lo = std::min(lo, std::abs(det_field.eval(p)));
            ++accepted;
        } catch (const DomainError&) {
        }
    }
    if (accepted == 0) throw DomainError("no usable metric sample points");
    return lo;
}

double metric_symmetry_residual(const PseudoMetric& g, Sampler& sampler, int count,
                                const SampleBox& box) {
    double worst = 0.0;
    for (int lambda = 0; lambda <= g.dim; ++lambda)
        for (int mu = lambda + 1; mu <= g.dim; ++mu)
            worst = std::max(worst, jetflow::max_difference(g.g[lambda][mu], g.g[mu][lambda],
                                                            sampler, count, box));
    return worst;
}

bool mass_positive_definite(const QuadraticLagrangian& lagrangian, Sampler& sampler, int count,
                            const SampleBox& box) {
    const int m = lagrangian.dim;
    int accepted = 0;
    for (int trial = 0; trial < count * 4 && accepted < count; ++trial) {
        const Point p = sampler.next_point(m, box);
        std::vector<std::vector<double>> a(m, std::vector<double>(m));
        try {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) a[i][j] = lagrangian.mass[i][j].eval(p);
        } catch (const DomainError&) {
            continue;
        }
        ++accepted;
        // Cholesky without pivoting succeeds exactly on positive-definite input.
        for (int c = 0; c < m; ++c) {
            double diag = a[c][c];
            for (int k = 0; k < c; ++k) diag -= a[c][k] * a[c][k];
            if (!(diag > 0.0)) return false;
            a[c][c] = std::sqrt(diag);
            for (int r = c + 1; r < m; ++r) {
                double v = a[r][c];
                for (int k = 0; k < c; ++k) v -= a[r][k] * a[c][k];
                a[r][c] = v / a[c][c];
            }
        }
    }
    if (accepted == 0) throw DomainError("no usable mass sample points");
    return true;
}

LinearTangentConnection levi_civita(const PseudoMetric& g, Sampler& sampler, int count,
                                    const SampleBox& box) {
    if (min_metric_determinant(g, sampler, count, box) < 1e-10)
        throw SingularMetric("metric degenerate on sampled domain");
    const int n = g.dim + 1;
    const auto lower = christoffel_lower(g);
    const auto ginv = sym_inverse(field_matrix(g.g));

    auto L = LinearTangentConnection::zero(g.dim);
    for (int lambda = 0; lambda < n; ++lambda)
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu) {
                ExprPtr acc = constant(0.0);
                for (int alpha = 0; alpha < n; ++alpha)
                    acc = add(acc, mul(ginv[mu][alpha], lower[lambda][alpha][nu].ast()));
                L.coeffs[lambda][mu][nu] = ScalarField(g.dim, acc);
            }
    return L;
}

// ============================================================================
// Lagrangians
// ============================================================================

MetricFromLagrangian metric_from_lagrangian(const QuadraticLagrangian& lagrangian,
                                            Sampler& sampler, int count, const SampleBox& box) {
    const int m = lagrangian.dim;
    std::vector<std::vector<ScalarField>> g(
        m + 1, std::vector<ScalarField>(m + 1, ScalarField::constant(m, 0.0)));
    g[0][0] = -2.0 * lagrangian.f;
    for (int i = 1; i <= m; ++i) {
        g[0][i] = -lagrangian.k[i - 1];
        g[i][0] = -lagrangian.k[i - 1];
        for (int j = 1; j <= m; ++j) g[i][j] = -lagrangian.mass[i - 1][j - 1];
    }
    MetricFromLagrangian out;
    out.metric = PseudoMetric(m, std::move(g));
    out.min_abs_det = min_metric_determinant(out.metric, sampler, count, box);
    out.degenerate = out.min_abs_det < 1e-10;
    return out;
}

namespace {

// xi^i = -(mass^-1)^{ik} {lambda k nu} u^lambda u^nu at u^0 = 1, u^j = v^j.
DynamicEquation christoffel_sode(const std::vector<std::vector<ScalarField>>& mass,
                                 const PseudoMetric& g) {
    const int m = g.dim;
    const auto lower = christoffel_lower(g);
    const auto minv = sym_inverse(field_matrix(mass));

    auto u = [&](int lambda) {
        return lambda == 0 ? constant(1.0) : variable(sym_v(lambda));
    };

    std::vector<ScalarField> xi;
    for (int i = 1; i <= m; ++i) {
        ExprPtr acc = constant(0.0);
        for (int k = 1; k <= m; ++k) {
            ExprPtr contracted = constant(0.0);
            for (int lambda = 0; lambda <= m; ++lambda)
                for (int nu = 0; nu <= m; ++nu)
                    contracted = add(contracted, mul(lower[lambda][k][nu].ast(),
                                                     mul(u(lambda), u(nu))));
            acc = add(acc, mul(minv[i - 1][k - 1], contracted));
        }
        xi.push_back(ScalarField(m, neg(acc)));
    }
    return DynamicEquation(std::move(xi));
}

double sampled_mass_min_det(const std::vector<std::vector<ScalarField>>& mass, int m,
                            Sampler& sampler, int count, const SampleBox& box) {
    const ScalarField det_field(m, sym_det(field_matrix(mass)));
    double lo = 1e300;
    int accepted = 0;
    for (int i = 0; i < count * 4 && accepted < count; ++i) {
        Point p = sampler.next_point(m, box);
        try {
            lo = std::min(lo, std::abs(det_field.eval(p)));
            ++accepted;
        } catch (const DomainError&) {
        }
    }
    if (accepted == 0) throw DomainError("no usable mass sample points");
    return lo;
}

}  // namespace

DynamicEquation lagrange_sode(const QuadraticLagrangian& lagrangian, Sampler& sampler,
                              int count, const SampleBox& box) {
    if (sampled_mass_min_det(lagrangian.mass, lagrangian.dim, sampler, count, box) < 1e-10)
        throw SingularMass("mass tensor degenerate on sampled domain");
    MetricFromLagrangian built = metric_from_lagrangian(lagrangian, sampler, count, box);
    return christoffel_sode(lagrangian.mass, built.metric);
}

DynamicEquation nonrelativistic_sode(const PseudoMetric& g, Sampler& sampler, int count,
                                     const SampleBox& box) {
    const LinearTangentConnection lc = levi_civita(g, sampler, count, box);
    std::vector<ScalarField> rest(g.dim, ScalarField::constant(g.dim, 0.0));
    return dynamic_equation_from_tangent(lc.to_tangent_connection(), rest);
}

// ============================================================================
// Hyperboloid preservation
// ============================================================================

double hyperboloid_check(const TangentConnection& k, const PseudoMetric& g, Sampler& sampler,
                         int count, const SampleBox& box) {
    const int m = g.dim;
    if (k.dim != m) throw DimensionMismatch("connection/metric dimension mismatch");

    // d_lambda g_{mu nu} precomputed.
    const int n = m + 1;
    std::vector<std::vector<std::vector<ScalarField>>> dg(
        n, std::vector<std::vector<ScalarField>>(
               n, std::vector<ScalarField>(n, ScalarField::constant(m, 0.0))));
    for (int lambda = 0; lambda < n; ++lambda)
        for (int mu = 0; mu < n; ++mu)
            for (int nu = 0; nu < n; ++nu)
                dg[lambda][mu][nu] = g.g[mu][nu].partial(coord_sym(lambda));

    double worst = 0.0;
    int accepted = 0;
    for (int trial = 0; trial < count * 8 && accepted < count; ++trial) {
        TangentPoint tp = sampler.next_tangent(m, box);
        double s;
        try {
            s = g.quadratic_form(tp);
        } catch (const DomainError&) {
            continue;
        }
        if (!(s > 1e-9)) continue;  // not rescalable onto the hyperboloid
        const double scale = 1.0 / std::sqrt(s);
        for (double& x : tp.xdot) x *= scale;

        const Point p = to_point(tp);
        try {
            double total = 0.0;
            for (int lambda = 0; lambda < n; ++lambda)
                for (int nu = 0; nu < n; ++nu) {
                    double inner = 0.0;
                    for (int mu = 0; mu < n; ++mu)
                        inner += dg[lambda][mu][nu].eval(p) * tp.xdot[mu] +
                                 2.0 * g.g[mu][nu].eval(p) * k.K[mu][lambda].eval(p);
                    total += inner * tp.xdot[lambda] * tp.xdot[nu];
                }
            worst = std::max(worst, std::abs(total));
            ++accepted;
        } catch (const DomainError&) {
            continue;
        }
    }
    if (accepted == 0)
        throw NoHyperboloidPoint("no sampled tangent vector lies in the g > 0 cone");
    return worst;
}

// ============================================================================
// Relativization
// ============================================================================

RelativizeResult relativize(const QuadraticSODE& qs, const PseudoMetric& g, Sampler& sampler,
                            int count, const SampleBox& box) {
    const int m = g.dim;
    if (qs.dim != m) throw DimensionMismatch("equation/metric dimension mismatch");

    for (int i = 1; i <= m; ++i)
        if (max_value(g.g[0][i], sampler, count, box) > 1e-10)
            throw ChartNotAdapted("relativization needs coordinates with g_0i = 0");
    if (min_metric_determinant(g, sampler, count, box) < 1e-10)
        throw SingularMetric("metric degenerate on sampled domain");

    std::vector<std::vector<ScalarField>> mass(
        m, std::vector<ScalarField>(m, ScalarField::constant(m, 0.0)));
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) mass[i - 1][j - 1] = -g.g[i][j];
    if (sampled_mass_min_det(mass, m, sampler, count, box) < 1e-10)
        throw SingularMetric("spatial metric block degenerate on sampled domain");

    // Residual force after removing the metric's own Christoffel part.
    const DynamicEquation metric_part = christoffel_sode(mass, g);
    const DynamicEquation source = qs.to_equation();
    std::vector<ScalarField> residual;
    for (int i = 0; i < m; ++i) residual.push_back(source.xi[i] - metric_part.xi[i]);

    RelativizeResult result;
    for (int i = 0; i < m; ++i)
        for (int j = 1; j <= m; ++j)
            for (int l = j; l <= m; ++l) {
                const double r = max_value(residual[i].partial(sym_v(j)).partial(sym_v(l)),
                                           sampler, count, box);
                result.max_second_vertical_derivative =
                    std::max(result.max_second_vertical_derivative, r);
            }
    if (result.max_second_vertical_derivative > 1e-9) {
        result.verdict = RelativizeResult::Verdict::NotQuadraticResidual;
        return result;
    }

    SubstitutionMap zero_v;
    for (int j = 1; j <= m; ++j) zero_v[sym_v(j)] = constant(0.0);
    result.force.assign(m, std::vector<ScalarField>(m + 1, ScalarField::constant(m, 0.0)));
    for (int i = 0; i < m; ++i) {
        result.force[i][0] = residual[i].substitute(zero_v);
        for (int j = 1; j <= m; ++j)
            result.force[i][j] = residual[i].partial(sym_v(j)).substitute(zero_v);
    }

    // Lorentz-type condition: the metric-lowered velocity coupling is
    // antisymmetric, g_ik b^i_j + g_ij b^i_k = 0.
    for (int kk = 1; kk <= m; ++kk)
        for (int j = kk; j <= m; ++j) {
            ScalarField s = ScalarField::constant(m, 0.0);
            for (int i = 1; i <= m; ++i)
                s = s + g.g[i][kk] * result.force[i - 1][j] + g.g[i][j] * result.force[i - 1][kk];
            result.max_symmetric_part =
                std::max(result.max_symmetric_part, max_value(s, sampler, count, box));
        }
    if (result.max_symmetric_part > 1e-9) {
        result.verdict = RelativizeResult::Verdict::NotLorentzType;
        return result;
    }

    // K = Levi-Civita + soldering force. In the adapted chart g^{00} = 1/g_00.
    TangentConnection k = levi_civita(g, sampler, count, box).to_tangent_connection();
    for (int i = 1; i <= m; ++i) {
        k.K[i][0] = k.K[i][0] + result.force[i - 1][0];
        for (int j = 1; j <= m; ++j) k.K[i][j] = k.K[i][j] + result.force[i - 1][j];
    }
    for (int kk = 1; kk <= m; ++kk) {
        ScalarField sigma0k = ScalarField::constant(m, 0.0);
        for (int j = 1; j <= m; ++j)
            sigma0k = sigma0k - g.g[kk][j] * result.force[j - 1][0];
        k.K[0][kk] = k.K[0][kk] + sigma0k / g.g[0][0];
    }

    result.verdict = RelativizeResult::Verdict::LorentzType;
    result.hyperboloid_residual = hyperboloid_check(k, g, sampler, count, box);
    result.connection = std::move(k);
    return result;
}

// ============================================================================
// Non-relativistic limit
// ============================================================================

LimitComparison nonrel_limit_compare(const PseudoMetric& g, const std::vector<double>& q0,
                                     const std::vector<double>& u, double v_scale,
                                     Sampler& sampler, const IntegratorConfig& cfg) {
    const int m = g.dim;
    if (static_cast<int>(q0.size()) != m || static_cast<int>(u.size()) != m)
        throw DimensionMismatch("initial data dimension mismatch");

    const LinearTangentConnection lc = levi_civita(g, sampler);
    const TangentConnection k = lc.to_tangent_connection();
    const DynamicEquation nonrel = nonrelativistic_sode(g, sampler);

    JetPoint jp;
    jp.t = 0.0;
    jp.q = q0;
    jp.v.resize(m);
    for (int i = 0; i < m; ++i) jp.v[i] = v_scale * u[i];
    const Trajectory newton = integrate_sode(nonrel, jp, cfg);

    // Initial 4-velocity on the hyperboloid with 3-velocity v_scale * u.
    TangentPoint tp;
    tp.x.push_back(0.0);
    tp.x.insert(tp.x.end(), q0.begin(), q0.end());
    tp.xdot.assign(m + 1, 1.0);
    for (int i = 0; i < m; ++i) tp.xdot[i + 1] = v_scale * u[i];
    const double s = g.quadratic_form(tp);
    if (!(s > 0.0))
        throw NoHyperboloidPoint("matched initial data leaves the g > 0 cone");
    const double scale = 1.0 / std::sqrt(s);
    for (double& x : tp.xdot) x *= scale;

    IntegratorConfig geo_cfg = cfg;
    geo_cfg.window = cfg.window / tp.xdot[0] * 1.25 + 4.0 * cfg.max_step;
    const Trajectory geodesic = integrate_geodesic(k, tp, geo_cfg);

    LimitComparison out;
    out.v_scale = v_scale;
    out.window = cfg.window;
    out.max_position_error = compare_trajectories(
        newton, sode_position_projection(m), geodesic, geodesic_position_projection(m));

    double excursion = 0.0;
    for (const auto& sample : newton.samples)
        for (int i = 0; i < m; ++i)
            excursion = std::max(excursion, std::abs(sample.state[i] - q0[i]));
    out.relative_position_error =
        excursion > 0.0 ? out.max_position_error / excursion : out.max_position_error;
    return out;
}

}  // namespace jetflow
