#include "jetflow/frames.hpp"

#include <algorithm>
#include <cmath>

namespace jetflow {

namespace {

bool structurally_zero(const ScalarField& f) { return is_zero(f.ast()); }

ScalarField dt_free(const ReferenceFrame& frame, int i) {
    // d_t Gamma^i with the velocity left free.
    const int m = frame.dim;
    ScalarField out = frame.Gamma[i].partial(sym_t());
    for (int j = 1; j <= m; ++j)
        out = out + ScalarField::velocity(m, j) * frame.Gamma[i].partial(sym_q(j));
    return out;
}

}  // namespace

ReferenceFrame::ReferenceFrame(std::vector<ScalarField> components)
    : dim(static_cast<int>(components.size())), Gamma(std::move(components)) {
    if (dim < 1) throw DimensionMismatch("reference frame needs fibre dimension >= 1");
    for (const auto& f : Gamma) {
        if (f.dim() != dim) throw DimensionMismatch("component dimension mismatch");
        if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
            throw DimensionMismatch("frame components must be velocity-independent");
    }
}

ReferenceFrame ReferenceFrame::rest(int dim) {
    return ReferenceFrame(std::vector<ScalarField>(dim, ScalarField::constant(dim, 0.0)));
}

std::vector<double> relative_velocity(const ReferenceFrame& frame, const JetPoint& p) {
    if (p.dim() != frame.dim) throw DimensionMismatch("point/frame dimension mismatch");
    std::vector<double> out(frame.dim);
    for (int i = 0; i < frame.dim; ++i) out[i] = p.v[i] - frame.Gamma[i].eval(p);
    return out;
}

ScalarField compose_with_frame(const ScalarField& f, const ReferenceFrame& frame) {
    SubstitutionMap subs;
    for (int j = 1; j <= frame.dim; ++j) subs[sym_v(j)] = frame.Gamma[j - 1].ast();
    return f.substitute(subs);
}

FrameConnection frame_connection(const DynamicConnection& g, const ReferenceFrame& frame) {
    const int m = g.dim;
    if (frame.dim != m) throw DimensionMismatch("frame/connection dimension mismatch");

    std::vector<ScalarField> g0;
    std::vector<std::vector<ScalarField>> gj(m);
    for (int i = 0; i < m; ++i) {
        ScalarField c0 = dt_free(frame, i);
        for (int k = 1; k <= m; ++k) {
            const ScalarField soldering =
                frame.Gamma[i].partial(sym_q(k)) - compose_with_frame(g.gamma[i][k - 1], frame);
            gj[i].push_back(g.gamma[i][k - 1] + soldering);
            c0 = c0 - g.gamma[i][k - 1] * frame.Gamma[k - 1] -
                 frame.Gamma[k - 1] * soldering;
        }
        g0.push_back(c0);
    }
    return FrameConnection{frame, DynamicConnection(std::move(g0), std::move(gj))};
}

DynamicEquation frame_lift(const DynamicConnection& g, const ReferenceFrame& frame) {
    const int m = g.dim;
    if (frame.dim != m) throw DimensionMismatch("frame/connection dimension mismatch");
    std::vector<ScalarField> xi;
    for (int i = 0; i < m; ++i) {
        ScalarField e = dt_free(frame, i);
        for (int k = 1; k <= m; ++k) {
            const ScalarField factor = frame.Gamma[i].partial(sym_q(k)) + g.gamma[i][k - 1] -
                                       compose_with_frame(g.gamma[i][k - 1], frame);
            e = e + factor * (ScalarField::velocity(m, k) - frame.Gamma[k - 1]);
        }
        xi.push_back(e);
    }
    return DynamicEquation(std::move(xi));
}

std::vector<ScalarField> relative_acceleration(const DynamicEquation& eq,
                                               const ReferenceFrame& frame) {
    if (std::all_of(frame.Gamma.begin(), frame.Gamma.end(), structurally_zero))
        return relative_acceleration_proper(eq);
    const DynamicConnection gamma = connection_from_sode(eq);
    const DynamicEquation lifted = frame_lift(gamma, frame);
    std::vector<ScalarField> out;
    for (int i = 0; i < eq.dim; ++i) out.push_back(eq.xi[i] - lifted.xi[i]);
    return out;
}

std::vector<ScalarField> relative_acceleration_proper(const DynamicEquation& eq) {
    const int m = eq.dim;
    SubstitutionMap zero_v;
    for (int j = 1; j <= m; ++j) zero_v[sym_v(j)] = constant(0.0);
    std::vector<ScalarField> out;
    for (int i = 0; i < m; ++i) {
        ScalarField e = eq.xi[i];
        for (int k = 1; k <= m; ++k) {
            const ScalarField dvk = eq.xi[i].partial(sym_v(k));
            e = e - 0.5 * ScalarField::velocity(m, k) * (dvk - dvk.substitute(zero_v));
        }
        out.push_back(e);
    }
    return out;
}

ReferenceFrame transform_frame(const ReferenceFrame& frame, const ChartTransform& chart) {
    const int m = frame.dim;
    if (chart.dim != m) throw DimensionMismatch("chart/frame dimension mismatch");
    std::vector<ScalarField> out;
    for (int i = 0; i < m; ++i) {
        ScalarField e = chart.forward[i].partial(sym_t());
        for (int j = 1; j <= m; ++j)
            e = e + frame.Gamma[j - 1] * chart.forward[i].partial(sym_q(j));
        out.push_back(pullback_jet_field(chart, e));
    }
    return ReferenceFrame(std::move(out));
}

std::vector<ScalarField> pushforward_vertical(const std::vector<ScalarField>& a,
                                              const ChartTransform& chart) {
    const int m = chart.dim;
    if (static_cast<int>(a.size()) != m)
        throw DimensionMismatch("vector/chart dimension mismatch");
    std::vector<ScalarField> out;
    for (int i = 0; i < m; ++i) {
        ScalarField e = ScalarField::constant(m, 0.0);
        for (int j = 1; j <= m; ++j) e = e + chart.forward[i].partial(sym_q(j)) * a[j - 1];
        out.push_back(pullback_jet_field(chart, e));
    }
    return out;
}

ReferenceFrame frame_from_motion(const Trajectory& motion, int dim, int knots) {
    if (motion.samples.empty()) throw TrajectoryMismatch("empty trajectory");
    if (static_cast<int>(motion.samples.front().state.size()) != 2 * dim)
        throw TrajectoryMismatch("trajectory state is not a jet state of this dimension");
    knots = std::max(knots, 2);

    const double t0 = motion.t_front();
    const double t1 = motion.t_back();
    if (!(t1 - t0 > 1e-9)) throw TrajectoryMismatch("motion window too short for a frame fit");
    std::vector<double> nodes(knots);
    for (int k = 0; k < knots; ++k) {
        const double c = std::cos(M_PI * (2.0 * k + 1.0) / (2.0 * knots));
        nodes[k] = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * c;
    }

    std::vector<ScalarField> components;
    for (int i = 0; i < dim; ++i) {
        // Newton divided differences through v^i(t) at Chebyshev nodes.
        std::vector<double> coef(knots);
        for (int k = 0; k < knots; ++k) coef[k] = motion.state_at(nodes[k])[dim + i];
        for (int level = 1; level < knots; ++level)
            for (int k = knots - 1; k >= level; --k)
                coef[k] = (coef[k] - coef[k - 1]) / (nodes[k] - nodes[k - level]);

        ExprPtr poly = constant(coef[knots - 1]);
        for (int k = knots - 2; k >= 0; --k)
            poly = add(constant(coef[k]),
                       mul(sub(variable(sym_t()), constant(nodes[k])), poly));
        components.push_back(ScalarField(dim, poly));
    }
    return ReferenceFrame(std::move(components));
}

Trajectory pushforward_trajectory(const ChartTransform& chart, const Trajectory& traj,
                                  const DynamicEquation& source) {
    const int m = chart.dim;
    if (source.dim != m) throw DimensionMismatch("chart/equation dimension mismatch");
    if (traj.samples.empty() ||
        static_cast<int>(traj.samples.front().state.size()) != 2 * m)
        throw TrajectoryMismatch("trajectory does not match the chart dimension");

    // Primed velocity field and its total derivative along the motion.
    std::vector<ScalarField> w;       // v'^i(t, q, v)
    std::vector<ScalarField> wdot;    // d/dt of w along solutions of `source`
    for (int i = 0; i < m; ++i) {
        const ScalarField wi = total_time_derivative(chart.forward[i]);
        ScalarField di = wi.partial(sym_t());
        for (int j = 1; j <= m; ++j) {
            di = di + ScalarField::velocity(m, j) * wi.partial(sym_q(j));
            di = di + source.xi[j - 1] * wi.partial(sym_v(j));
        }
        w.push_back(wi);
        wdot.push_back(di);
    }

    Trajectory out;
    out.status = traj.status;
    out.integrator = traj.integrator;
    out.abs_tol = traj.abs_tol;
    out.rel_tol = traj.rel_tol;
    out.steps_accepted = traj.steps_accepted;
    out.steps_rejected = traj.steps_rejected;
    out.columns = traj.columns;

    for (const auto& sample : traj.samples) {
        JetPoint p{sample.t, std::vector<double>(sample.state.begin(), sample.state.begin() + m),
                   std::vector<double>(sample.state.begin() + m, sample.state.end())};
        const JetPoint pushed = pushforward_jet(chart, p);
        TrajectorySample s;
        s.t = pushed.t;
        s.state.insert(s.state.end(), pushed.q.begin(), pushed.q.end());
        s.state.insert(s.state.end(), pushed.v.begin(), pushed.v.end());
        for (int i = 0; i < m; ++i) s.deriv.push_back(pushed.v[i]);
        for (int i = 0; i < m; ++i) s.deriv.push_back(wdot[i].eval(p));
        out.samples.push_back(std::move(s));
    }
    return out;
}

double vertical_covariant_residual(const DynamicEquation& eq, const ReferenceFrame& frame,
                                   const Trajectory& traj) {
    const int m = eq.dim;
    if (frame.dim != m) throw DimensionMismatch("frame/equation dimension mismatch");
    if (traj.samples.empty() ||
        static_cast<int>(traj.samples.front().state.size()) != 2 * m)
        throw TrajectoryMismatch("trajectory does not match the equation dimension");

    const DynamicConnection gamma = connection_from_sode(eq);
    const DynamicEquation lifted = frame_lift(gamma, frame);
    const std::vector<ScalarField> accel = relative_acceleration(eq, frame);

    const double t0 = traj.t_front();
    const double t1 = traj.t_back();
    const double h = 5e-4 * std::max(1.0, (t1 - t0));
    const int grid = 200;

    double worst = 0.0;
    for (int g = 0; g <= grid; ++g) {
        const double t = (t0 + h) + (t1 - t0 - 2 * h) * static_cast<double>(g) / grid;
        const std::vector<double> plus = traj.state_at(t + h);
        const std::vector<double> minus = traj.state_at(t - h);
        const std::vector<double> here = traj.state_at(t);
        JetPoint p{t, std::vector<double>(here.begin(), here.begin() + m),
                   std::vector<double>(here.begin() + m, here.end())};
        for (int i = 0; i < m; ++i) {
            const double dtv = (plus[m + i] - minus[m + i]) / (2.0 * h);
            const double r = dtv - lifted.xi[i].eval(p) - accel[i].eval(p);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

}  // namespace jetflow
