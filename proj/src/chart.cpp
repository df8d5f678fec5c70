#include "jetflow/chart.hpp"

#include <cmath>

namespace jetflow {

namespace {

// Determinant by Gaussian elimination with partial pivoting.
double det(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    double d = 1.0;
    for (int c = 0; c < n; ++c) {
        int pivot = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[pivot][c])) pivot = r;
        if (a[pivot][c] == 0.0) return 0.0;
        if (pivot != c) {
            std::swap(a[pivot], a[c]);
            d = -d;
        }
        d *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            double f = a[r][c] / a[c][c];
            for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return d;
}

}  // namespace

ChartTransform::ChartTransform(std::vector<ScalarField> fwd, std::vector<ScalarField> inv,
                               double shift)
    : dim(static_cast<int>(fwd.size())),
      forward(std::move(fwd)),
      inverse(std::move(inv)),
      time_shift(shift) {
    if (dim < 1) throw DimensionMismatch("chart needs at least one fibre coordinate");
    if (static_cast<int>(inverse.size()) != dim)
        throw DimensionMismatch("chart forward/inverse component counts differ");
    for (const auto& f : forward)
        if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
            throw DimensionMismatch("transition functions must not involve velocities");
    for (const auto& f : inverse)
        if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
            throw DimensionMismatch("transition functions must not involve velocities");
    for (const auto& f : forward)
        if (f.dim() != dim) throw DimensionMismatch("chart component dimension mismatch");
    for (const auto& f : inverse)
        if (f.dim() != dim) throw DimensionMismatch("chart component dimension mismatch");
}

ChartTransform ChartTransform::identity(int dim) {
    std::vector<ScalarField> fwd, inv;
    for (int i = 1; i <= dim; ++i) {
        fwd.push_back(ScalarField::coord(dim, i));
        inv.push_back(ScalarField::coord(dim, i));
    }
    return ChartTransform(std::move(fwd), std::move(inv), 0.0);
}

ChartTransform inverse_chart(const ChartTransform& chart) {
    return ChartTransform(chart.inverse, chart.forward, -chart.time_shift);
}

std::vector<std::vector<double>> chart_jacobian(const ChartTransform& chart, double t,
                                                const std::vector<double>& q) {
    const int m = chart.dim;
    Point p;
    p.t = t;
    p.q = q;
    p.v.assign(m, 0.0);
    std::vector<std::vector<double>> jac(m, std::vector<double>(m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            jac[i][j] = chart.forward[i].partial(sym_q(j + 1)).eval(p);
    if (std::abs(det(jac)) < 1e-12)
        throw SingularJacobian("chart Jacobian singular at sampled point");
    return jac;
}

JetPoint pushforward_jet(const ChartTransform& chart, const JetPoint& p) {
    const int m = chart.dim;
    if (p.dim() != m) throw DimensionMismatch("point/chart dimension mismatch");
    auto jac = chart_jacobian(chart, p.t, p.q);

    Point base;
    base.t = p.t;
    base.q = p.q;
    base.v.assign(m, 0.0);

    JetPoint out;
    out.t = p.t + chart.time_shift;
    out.q.resize(m);
    out.v.resize(m);
    for (int i = 0; i < m; ++i) {
        out.q[i] = chart.forward[i].eval(base);
        double vt = chart.forward[i].partial(sym_t()).eval(base);
        for (int j = 0; j < m; ++j) vt += jac[i][j] * p.v[j];
        out.v[i] = vt;
    }
    return out;
}

TangentPoint pushforward_tangent(const ChartTransform& chart, const TangentPoint& p) {
    const int m = chart.dim;
    if (p.dim() != m) throw DimensionMismatch("point/chart dimension mismatch");
    std::vector<double> q(p.x.begin() + 1, p.x.end());
    auto jac = chart_jacobian(chart, p.x[0], q);

    Point base;
    base.t = p.x[0];
    base.q = q;
    base.v.assign(m, 0.0);

    TangentPoint out;
    out.x.resize(m + 1);
    out.xdot.resize(m + 1);
    out.x[0] = p.x[0] + chart.time_shift;
    out.xdot[0] = p.xdot[0];
    for (int i = 0; i < m; ++i) {
        out.x[i + 1] = chart.forward[i].eval(base);
        double vi = chart.forward[i].partial(sym_t()).eval(base) * p.xdot[0];
        for (int j = 0; j < m; ++j) vi += jac[i][j] * p.xdot[j + 1];
        out.xdot[i + 1] = vi;
    }
    return out;
}

ScalarField pullback_jet_field(const ChartTransform& chart, const ScalarField& f) {
    const int m = chart.dim;
    if (f.dim() != m) throw DimensionMismatch("field/chart dimension mismatch");
    SubstitutionMap subs;
    subs[sym_t()] = sub(variable(sym_t()), constant(chart.time_shift));
    for (int j = 1; j <= m; ++j) {
        subs[sym_q(j)] = chart.inverse[j - 1].ast();
        subs[sym_v(j)] = total_time_derivative(chart.inverse[j - 1]).ast();
    }
    return f.substitute(subs);
}

ScalarField pullback_tangent_field(const ChartTransform& chart, const ScalarField& f) {
    const int m = chart.dim;
    if (f.dim() != m) throw DimensionMismatch("field/chart dimension mismatch");
    SubstitutionMap subs;
    subs[sym_t()] = sub(variable(sym_t()), constant(chart.time_shift));
    for (int j = 1; j <= m; ++j) {
        const ScalarField& inv = chart.inverse[j - 1];
        subs[sym_q(j)] = inv.ast();
        ExprPtr vel = mul(inv.partial(sym_t()).ast(), variable(sym_vt()));
        for (int k = 1; k <= m; ++k)
            vel = add(vel, mul(variable(sym_v(k)), inv.partial(sym_q(k)).ast()));
        subs[sym_v(j)] = vel;
    }
    return f.substitute(subs);
}

ChartValidation validate_chart(const ChartTransform& chart, Sampler& sampler, int count,
                               const SampleBox& box) {
    const int m = chart.dim;
    ChartValidation result;
    result.min_abs_jacobian_det = 1e300;
    const ChartTransform inv = inverse_chart(chart);
    int accepted = 0;
    int attempts = 0;
    while (accepted < count && attempts < 4 * count) {
        ++attempts;
        JetPoint p = sampler.next_jet(m, box);
        try {
            JetPoint back = pushforward_jet(inv, pushforward_jet(chart, p));
            double err = std::abs(back.t - p.t);
            for (int i = 0; i < m; ++i) {
                err = std::max(err, std::abs(back.q[i] - p.q[i]));
                err = std::max(err, std::abs(back.v[i] - p.v[i]));
            }
            auto jac = chart_jacobian(chart, p.t, p.q);
            result.max_round_trip_error = std::max(result.max_round_trip_error, err);
            result.min_abs_jacobian_det = std::min(result.min_abs_jacobian_det, std::abs(det(jac)));
            ++accepted;
        } catch (const SingularJacobian&) {
            result.min_abs_jacobian_det = 0.0;
            ++accepted;
        } catch (const DomainError&) {
            continue;
        }
    }
    if (accepted == 0) throw DomainError("no usable chart sample points");
    return result;
}

}  // namespace jetflow
