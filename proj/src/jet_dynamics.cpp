#include "jetflow/jet_dynamics.hpp"

#include <cmath>

namespace jetflow {

namespace {

void check_jet_fields(const std::vector<ScalarField>& fields, int dim) {
    for (const auto& f : fields) {
        if (f.dim() != dim) throw DimensionMismatch("component dimension mismatch");
        if (f.depends_on(SymKind::VelTime))
            throw DimensionMismatch("jet-space field must not involve xdot0");
    }
}

SubstitutionMap zero_velocity_map(int m) {
    SubstitutionMap subs;
    for (int j = 1; j <= m; ++j) subs[sym_v(j)] = constant(0.0);
    return subs;
}

}  // namespace

// ============================================================================
// Types
// ============================================================================

DynamicEquation::DynamicEquation(std::vector<ScalarField> components)
    : dim(static_cast<int>(components.size())), xi(std::move(components)) {
    if (dim < 1) throw DimensionMismatch("dynamic equation needs fibre dimension >= 1");
    check_jet_fields(xi, dim);
}

DynamicEquation DynamicEquation::zero(int dim) {
    std::vector<ScalarField> xs(dim, ScalarField::constant(dim, 0.0));
    return DynamicEquation(std::move(xs));
}

DynamicConnection::DynamicConnection(std::vector<ScalarField> g0,
                                     std::vector<std::vector<ScalarField>> gj)
    : dim(static_cast<int>(g0.size())), gamma0(std::move(g0)), gamma(std::move(gj)) {
    if (dim < 1) throw DimensionMismatch("dynamic connection needs fibre dimension >= 1");
    check_jet_fields(gamma0, dim);
    if (static_cast<int>(gamma.size()) != dim)
        throw DimensionMismatch("connection row count differs from dimension");
    for (const auto& row : gamma) {
        if (static_cast<int>(row.size()) != dim)
            throw DimensionMismatch("connection column count differs from dimension");
        check_jet_fields(row, dim);
    }
}

DynamicConnection DynamicConnection::zero(int dim) {
    std::vector<ScalarField> g0(dim, ScalarField::constant(dim, 0.0));
    std::vector<std::vector<ScalarField>> gj(
        dim, std::vector<ScalarField>(dim, ScalarField::constant(dim, 0.0)));
    return DynamicConnection(std::move(g0), std::move(gj));
}

AffineDynamicConnection::AffineDynamicConnection(
    int dim_, std::vector<std::vector<std::vector<ScalarField>>> c)
    : dim(dim_), coeffs(std::move(c)) {
    if (static_cast<int>(coeffs.size()) != dim)
        throw DimensionMismatch("affine connection component count mismatch");
    for (const auto& block : coeffs) {
        if (static_cast<int>(block.size()) != dim + 1)
            throw DimensionMismatch("affine connection lambda range mismatch");
        for (const auto& row : block) {
            if (static_cast<int>(row.size()) != dim + 1)
                throw DimensionMismatch("affine connection mu range mismatch");
            for (const auto& f : row)
                if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
                    throw DimensionMismatch("affine coefficients must be velocity-free");
        }
    }
}

DynamicConnection AffineDynamicConnection::to_connection() const {
    std::vector<ScalarField> g0;
    std::vector<std::vector<ScalarField>> gj(dim);
    for (int i = 0; i < dim; ++i) {
        ScalarField c = coeffs[i][0][0];
        for (int j = 1; j <= dim; ++j)
            c = c + coeffs[i][0][j] * ScalarField::velocity(dim, j);
        g0.push_back(c);
        for (int l = 1; l <= dim; ++l) {
            ScalarField cl = coeffs[i][l][0];
            for (int j = 1; j <= dim; ++j)
                cl = cl + coeffs[i][l][j] * ScalarField::velocity(dim, j);
            gj[i].push_back(cl);
        }
    }
    return DynamicConnection(std::move(g0), std::move(gj));
}

DynamicEquation QuadraticSODE::to_equation() const {
    std::vector<ScalarField> xs;
    for (int i = 0; i < dim; ++i) {
        ScalarField e = f[i];
        for (int j = 1; j <= dim; ++j) {
            e = e + b[i][j - 1] * ScalarField::velocity(dim, j);
            for (int k = 1; k <= dim; ++k)
                e = e + a[i][j - 1][k - 1] * ScalarField::velocity(dim, j) *
                            ScalarField::velocity(dim, k);
        }
        xs.push_back(e);
    }
    return DynamicEquation(std::move(xs));
}

// ============================================================================
// Vector fields on the velocity phase space
// ============================================================================

namespace {

ScalarField directional(const JetVectorField& x, const ScalarField& f) {
    ScalarField out = x.ct * f.partial(sym_t());
    for (int i = 1; i <= x.dim; ++i) {
        out = out + x.cq[i - 1] * f.partial(sym_q(i));
        out = out + x.cv[i - 1] * f.partial(sym_v(i));
    }
    return out;
}

}  // namespace

JetVectorField lie_bracket(const JetVectorField& x, const JetVectorField& y) {
    if (x.dim != y.dim) throw DimensionMismatch("vector field dimension mismatch");
    JetVectorField out;
    out.dim = x.dim;
    out.ct = directional(x, y.ct) - directional(y, x.ct);
    for (int i = 0; i < x.dim; ++i) {
        out.cq.push_back(directional(x, y.cq[i]) - directional(y, x.cq[i]));
        out.cv.push_back(directional(x, y.cv[i]) - directional(y, x.cv[i]));
    }
    return out;
}

JetVectorField vertical_endomorphism(const JetVectorField& x) {
    JetVectorField out;
    out.dim = x.dim;
    out.ct = ScalarField::constant(x.dim, 0.0);
    for (int i = 1; i <= x.dim; ++i) {
        out.cq.push_back(ScalarField::constant(x.dim, 0.0));
        out.cv.push_back(x.cq[i - 1] - x.ct * ScalarField::velocity(x.dim, i));
    }
    return out;
}

// ============================================================================
// Conversions
// ============================================================================

DynamicEquation sode_from_connection(const DynamicConnection& g) {
    std::vector<ScalarField> xs;
    for (int i = 0; i < g.dim; ++i) {
        ScalarField e = g.gamma0[i];
        for (int j = 1; j <= g.dim; ++j)
            e = e + ScalarField::velocity(g.dim, j) * g.gamma[i][j - 1];
        xs.push_back(e);
    }
    return DynamicEquation(std::move(xs));
}

DynamicConnection connection_from_sode(const DynamicEquation& eq) {
    const int m = eq.dim;
    std::vector<ScalarField> g0;
    std::vector<std::vector<ScalarField>> gj(m);
    for (int i = 0; i < m; ++i) {
        ScalarField rest = eq.xi[i];
        for (int j = 1; j <= m; ++j) {
            ScalarField half = 0.5 * eq.xi[i].partial(sym_v(j));
            gj[i].push_back(half);
            rest = rest - ScalarField::velocity(m, j) * half;
        }
        g0.push_back(rest);
    }
    return DynamicConnection(std::move(g0), std::move(gj));
}

DynamicConnection resymmetrize(const DynamicConnection& g) {
    const int m = g.dim;
    const DynamicEquation eq = sode_from_connection(g);
    std::vector<std::vector<ScalarField>> gj(m);
    std::vector<ScalarField> g0;
    for (int k = 0; k < m; ++k) {
        for (int i = 1; i <= m; ++i) {
            ScalarField s = g.gamma[k][i - 1] + g.gamma0[k].partial(sym_v(i));
            for (int j = 1; j <= m; ++j)
                s = s + ScalarField::velocity(m, j) * g.gamma[k][j - 1].partial(sym_v(i));
            gj[k].push_back(0.5 * s);
        }
        ScalarField c0 = eq.xi[k];
        for (int i = 1; i <= m; ++i)
            c0 = c0 - ScalarField::velocity(m, i) * gj[k][i - 1];
        g0.push_back(c0);
    }
    return DynamicConnection(std::move(g0), std::move(gj));
}

SymmetryCheck check_symmetry(const DynamicConnection& g, Sampler& sampler, int count,
                             const SampleBox& box, double tol) {
    const int m = g.dim;
    SymmetryCheck result;
    for (int k = 0; k < m; ++k)
        for (int i = 1; i <= m; ++i)
            for (int j = i + 1; j <= m; ++j) {
                ScalarField lhs = g.gamma[k][i - 1].partial(sym_v(j));
                ScalarField rhs = g.gamma[k][j - 1].partial(sym_v(i));
                double r = jetflow::max_difference(lhs, rhs, sampler, count, box);
                result.max_residual = std::max(result.max_residual, r);
            }
    result.symmetric = result.max_residual < tol;
    return result;
}

SymmetryCheck check_symmetry(const AffineDynamicConnection& g, Sampler& sampler, int count,
                             const SampleBox& box, double tol) {
    SymmetryCheck result;
    for (int i = 0; i < g.dim; ++i)
        for (int lambda = 0; lambda <= g.dim; ++lambda)
            for (int mu = lambda + 1; mu <= g.dim; ++mu) {
                const double r = jetflow::max_difference(g.coeffs[i][lambda][mu],
                                                         g.coeffs[i][mu][lambda], sampler,
                                                         count, box);
                result.max_residual = std::max(result.max_residual, r);
            }
    result.symmetric = result.max_residual < tol;
    return result;
}

// ============================================================================
// Chart transformations
// ============================================================================

DynamicEquation transform_sode(const DynamicEquation& eq, const ChartTransform& chart) {
    const int m = eq.dim;
    if (chart.dim != m) throw DimensionMismatch("chart/equation dimension mismatch");
    std::vector<ScalarField> out;
    for (int i = 0; i < m; ++i) {
        const ScalarField& fwd = chart.forward[i];
        ScalarField e = fwd.partial(sym_t()).partial(sym_t());
        for (int j = 1; j <= m; ++j) {
            e = e + eq.xi[j - 1] * fwd.partial(sym_q(j));
            e = e + 2.0 * ScalarField::velocity(m, j) * fwd.partial(sym_q(j)).partial(sym_t());
            for (int k = 1; k <= m; ++k)
                e = e + ScalarField::velocity(m, j) * ScalarField::velocity(m, k) *
                            fwd.partial(sym_q(j)).partial(sym_q(k));
        }
        out.push_back(pullback_jet_field(chart, e));
    }
    return DynamicEquation(std::move(out));
}

DynamicConnection transform_connection(const DynamicConnection& g, const ChartTransform& chart) {
    const int m = g.dim;
    if (chart.dim != m) throw DimensionMismatch("chart/connection dimension mismatch");

    // Bracket term (d_j q'^i gamma^j_mu + d_mu d_t q'^i) in unprimed
    // variables, then pulled to the primed chart; mu = 0 is the time slot.
    std::vector<std::vector<ScalarField>> bracket(m);
    for (int i = 0; i < m; ++i) {
        const ScalarField dtq = total_time_derivative(chart.forward[i]);
        for (int mu = 0; mu <= m; ++mu) {
            Sym s = (mu == 0) ? sym_t() : sym_q(mu);
            ScalarField e = dtq.partial(s);
            for (int j = 1; j <= m; ++j) {
                const ScalarField& gcomp = (mu == 0) ? g.gamma0[j - 1] : g.gamma[j - 1][mu - 1];
                e = e + chart.forward[i].partial(sym_q(j)) * gcomp;
            }
            bracket[i].push_back(pullback_jet_field(chart, e));
        }
    }

    // Contract with dq^mu / dq'^lambda, read off the inverse components.
    std::vector<ScalarField> g0;
    std::vector<std::vector<ScalarField>> gj(m);
    for (int i = 0; i < m; ++i) {
        ScalarField c0 = bracket[i][0];  // dq^0/dq'^0 = 1
        for (int k = 1; k <= m; ++k)
            c0 = c0 + bracket[i][k] * chart.inverse[k - 1].partial(sym_t());
        g0.push_back(c0);
        for (int l = 1; l <= m; ++l) {
            ScalarField cl = ScalarField::constant(m, 0.0);  // dq^0/dq'^l = 0
            for (int k = 1; k <= m; ++k)
                cl = cl + bracket[i][k] * chart.inverse[k - 1].partial(sym_q(l));
            gj[i].push_back(cl);
        }
    }
    return DynamicConnection(std::move(g0), std::move(gj));
}

// ============================================================================
// Projector-route oracle
// ============================================================================

DynamicConnection vhat_oracle(const DynamicEquation& eq) {
    const int m = eq.dim;

    JetVectorField xi_vec;
    xi_vec.dim = m;
    xi_vec.ct = ScalarField::constant(m, 1.0);
    for (int i = 1; i <= m; ++i) {
        xi_vec.cq.push_back(ScalarField::velocity(m, i));
        xi_vec.cv.push_back(eq.xi[i - 1]);
    }

    auto project = [&](const JetVectorField& u) {
        // I_xi(u) = [xi, vhat(u)] - vhat([xi, u]), then J = (I + id)/2.
        JetVectorField i_u = lie_bracket(xi_vec, vertical_endomorphism(u));
        JetVectorField rest = vertical_endomorphism(lie_bracket(xi_vec, u));
        JetVectorField out;
        out.dim = m;
        out.ct = ScalarField::constant(m, 0.0);
        for (int i = 0; i < m; ++i) {
            out.cq.push_back(ScalarField::constant(m, 0.0));
            out.cv.push_back(0.5 * (i_u.cv[i] - rest.cv[i] + u.cv[i]));
        }
        return out;
    };

    auto horizontal_projection = [&](const JetVectorField& u) {
        // The holonomic projection onto vertical vectors along xi.
        JetVectorField out;
        out.dim = m;
        out.ct = ScalarField::constant(m, 0.0);
        for (int i = 1; i <= m; ++i) {
            out.cq.push_back(u.cq[i - 1] - u.ct * ScalarField::velocity(m, i));
            out.cv.push_back(u.cv[i - 1] - u.ct * eq.xi[i - 1]);
        }
        return out;
    };

    auto basis = [&](int lambda) {
        JetVectorField u;
        u.dim = m;
        u.ct = ScalarField::constant(m, lambda == 0 ? 1.0 : 0.0);
        for (int i = 1; i <= m; ++i) {
            u.cq.push_back(ScalarField::constant(m, lambda == i ? 1.0 : 0.0));
            u.cv.push_back(ScalarField::constant(m, 0.0));
        }
        return u;
    };

    std::vector<ScalarField> g0;
    std::vector<std::vector<ScalarField>> gj(m);
    for (int lambda = 0; lambda <= m; ++lambda) {
        JetVectorField image = project(horizontal_projection(basis(lambda)));
        for (int i = 0; i < m; ++i) {
            if (lambda == 0)
                g0.push_back(-image.cv[i]);
            else
                gj[i].push_back(-image.cv[i]);
        }
    }
    return DynamicConnection(std::move(g0), std::move(gj));
}

// ============================================================================
// Quadratic / affine extraction
// ============================================================================

QuadraticExtraction as_quadratic(const DynamicEquation& eq, Sampler& sampler, int count,
                                 const SampleBox& box, double tol) {
    const int m = eq.dim;
    QuadraticExtraction result;
    for (int i = 0; i < m && result.max_third_vertical_derivative <= tol; ++i)
        for (int j = 1; j <= m; ++j)
            for (int k = j; k <= m; ++k)
                for (int l = k; l <= m; ++l) {
                    ScalarField d3 =
                        eq.xi[i].partial(sym_v(j)).partial(sym_v(k)).partial(sym_v(l));
                    double r = max_value(d3, sampler, count, box);
                    result.max_third_vertical_derivative =
                        std::max(result.max_third_vertical_derivative, r);
                }
    if (result.max_third_vertical_derivative > tol) {
        result.quadratic = false;
        return result;
    }

    const SubstitutionMap zv = zero_velocity_map(m);
    QuadraticSODE qs;
    qs.dim = m;
    qs.a.resize(m);
    qs.b.resize(m);
    for (int i = 0; i < m; ++i) {
        qs.f.push_back(eq.xi[i].substitute(zv));
        qs.a[i].resize(m);
        for (int j = 1; j <= m; ++j) {
            qs.b[i].push_back(eq.xi[i].partial(sym_v(j)).substitute(zv));
            for (int k = 1; k <= m; ++k)
                qs.a[i][j - 1].push_back(
                    0.5 * eq.xi[i].partial(sym_v(j)).partial(sym_v(k)).substitute(zv));
        }
    }
    result.quadratic = true;
    result.value = std::move(qs);
    return result;
}

std::optional<AffineDynamicConnection> as_affine(const DynamicConnection& g, Sampler& sampler,
                                                 int count, const SampleBox& box, double tol) {
    const int m = g.dim;
    auto second_derivatives_vanish = [&](const ScalarField& f) {
        for (int j = 1; j <= m; ++j)
            for (int k = j; k <= m; ++k) {
                double r = max_value(f.partial(sym_v(j)).partial(sym_v(k)), sampler, count, box);
                if (r > tol) return false;
            }
        return true;
    };

    const SubstitutionMap zv = zero_velocity_map(m);
    std::vector<std::vector<std::vector<ScalarField>>> coeffs(m);
    for (int i = 0; i < m; ++i) {
        coeffs[i].resize(m + 1);
        for (int lambda = 0; lambda <= m; ++lambda) {
            const ScalarField& comp = (lambda == 0) ? g.gamma0[i] : g.gamma[i][lambda - 1];
            if (!second_derivatives_vanish(comp)) return std::nullopt;
            coeffs[i][lambda].push_back(comp.substitute(zv));
            for (int j = 1; j <= m; ++j)
                coeffs[i][lambda].push_back(comp.partial(sym_v(j)).substitute(zv));
        }
    }
    return AffineDynamicConnection(m, std::move(coeffs));
}

// ============================================================================
// Sampled comparisons
// ============================================================================

double max_difference(const DynamicEquation& a, const DynamicEquation& b, Sampler& sampler,
                      int count, const SampleBox& box) {
    if (a.dim != b.dim) throw DimensionMismatch("equation dimension mismatch");
    double worst = 0.0;
    for (int i = 0; i < a.dim; ++i)
        worst = std::max(worst, jetflow::max_difference(a.xi[i], b.xi[i], sampler, count, box));
    return worst;
}

double max_difference(const DynamicConnection& a, const DynamicConnection& b, Sampler& sampler,
                      int count, const SampleBox& box) {
    if (a.dim != b.dim) throw DimensionMismatch("connection dimension mismatch");
    double worst = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        worst = std::max(worst,
                         jetflow::max_difference(a.gamma0[i], b.gamma0[i], sampler, count, box));
        for (int j = 0; j < a.dim; ++j)
            worst = std::max(
                worst, jetflow::max_difference(a.gamma[i][j], b.gamma[i][j], sampler, count, box));
    }
    return worst;
}

}  // namespace jetflow
