#include "jetflow/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace jetflow {

// ============================================================================
// Trajectory
// ============================================================================

double Trajectory::t_front() const {
    if (samples.empty()) throw TrajectoryMismatch("empty trajectory");
    return samples.front().t;
}

double Trajectory::t_back() const {
    if (samples.empty()) throw TrajectoryMismatch("empty trajectory");
    return samples.back().t;
}

std::vector<double> Trajectory::state_at(double t) const {
    if (samples.empty()) throw TrajectoryMismatch("empty trajectory");
    if (t < samples.front().t - 1e-12 || t > samples.back().t + 1e-12)
        throw NoOverlap("time outside trajectory window");
    if (samples.size() == 1) return samples.front().state;

    auto it = std::lower_bound(samples.begin(), samples.end(), t,
                               [](const TrajectorySample& s, double x) { return s.t < x; });
    if (it == samples.begin()) ++it;
    if (it == samples.end()) --it;
    const TrajectorySample& hi = *it;
    const TrajectorySample& lo = *(it - 1);

    const double h = hi.t - lo.t;
    if (h <= 0.0) return lo.state;
    const double s = (t - lo.t) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;

    std::vector<double> out(lo.state.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * lo.state[i] + h * h10 * lo.deriv[i] + h01 * hi.state[i] +
                 h * h11 * hi.deriv[i];
    return out;
}

// ============================================================================
// Dormand-Prince 5(4)
// ============================================================================

namespace {

constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};

constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};

// Fifth-order weights are row 6 of kA; the embedded error weights are
// b5 - b4.
constexpr double kE[7] = {71.0 / 57600,      0.0,          -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525,   -1.0 / 40};

struct StepOutcome {
    bool ok = false;        // stages evaluated without a domain failure
    double error = 0.0;     // scaled error norm
    std::vector<double> y;  // proposed state
    std::vector<double> f;  // derivative at the proposed state (FSAL)
};

StepOutcome try_dp_step(const OdeRhs& rhs, double t, const std::vector<double>& y,
                        const std::vector<double>& f0, double h, double abs_tol,
                        double rel_tol) {
    const std::size_t n = y.size();
    StepOutcome out;
    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    k[0] = f0;
    std::vector<double> work(n);
    try {
        for (int stage = 1; stage < 7; ++stage) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = y[i];
                for (int j = 0; j < stage; ++j) acc += h * kA[stage][j] * k[j][i];
                work[i] = acc;
            }
            rhs(t + kC[stage] * h, work, k[stage]);
        }
    } catch (const DomainError&) {
        return out;  // reject; caller shrinks the step
    }

    // work now holds the 5th-order solution (stage 7 abscissa = 1, FSAL).
    // Max-norm error control: components with zero local error (such as the
    // affine x^0 direction of a geodesic flow) do not perturb the step
    // sequence, so equivalent flows integrate over identical grids.
    out.y = work;
    out.f = k[6];
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = 0.0;
        for (int j = 0; j < 7; ++j) e += kE[j] * k[j][i];
        e *= h;
        const double scale = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(out.y[i]));
        err = std::max(err, std::abs(e) / scale);
    }
    out.error = err;
    for (double v : out.y)
        if (!std::isfinite(v)) return StepOutcome{};
    out.ok = true;
    return out;
}

Trajectory integrate_rk45(const OdeRhs& rhs, double t0, std::vector<double> y0,
                          const IntegratorConfig& cfg) {
    Trajectory traj;
    traj.integrator = "rk45";
    traj.abs_tol = cfg.abs_tol;
    traj.rel_tol = cfg.rel_tol;

    const double t_end = t0 + cfg.window;
    const double h_min = 1e-12 * cfg.window;

    std::vector<double> f0(y0.size());
    rhs(t0, y0, f0);  // a domain failure at the initial point propagates
    traj.samples.push_back({t0, y0, f0});

    double t = t0;
    double h = std::min(cfg.max_step, cfg.window);
    const double t_eps = 1e-14 * std::max(1.0, std::abs(t_end));
    while (t < t_end - t_eps) {
        if (h < h_min) {
            // The controller drove the step below the underflow floor.
            traj.status = TrajectoryStatus::StepFailure;
            return traj;
        }
        const double h_step = std::min(h, t_end - t);
        StepOutcome step = try_dp_step(rhs, t, y0, f0, h_step, cfg.abs_tol, cfg.rel_tol);
        if (!step.ok) {
            ++traj.steps_rejected;
            h = h_step * 0.2;
            continue;
        }
        if (step.error <= 1.0) {
            t += h_step;
            y0 = std::move(step.y);
            f0 = std::move(step.f);
            traj.samples.push_back({t, y0, f0});
            ++traj.steps_accepted;
            const double grow =
                step.error == 0.0 ? 5.0 : 0.9 * std::pow(step.error, -0.2);
            h = std::min(cfg.max_step, h_step * std::clamp(grow, 0.2, 5.0));
        } else {
            ++traj.steps_rejected;
            h = h_step * std::clamp(0.9 * std::pow(step.error, -0.2), 0.2, 0.9);
        }
    }
    return traj;
}

Trajectory integrate_rk4(const OdeRhs& rhs, double t0, std::vector<double> y0,
                         const IntegratorConfig& cfg) {
    Trajectory traj;
    traj.integrator = "rk4";
    traj.abs_tol = cfg.abs_tol;
    traj.rel_tol = cfg.rel_tol;

    const std::size_t n = y0.size();
    const long steps =
        std::max(1L, static_cast<long>(std::ceil(cfg.window / cfg.max_step - 1e-12)));
    const double h = cfg.window / static_cast<double>(steps);

    std::vector<double> k1(n), k2(n), k3(n), k4(n), work(n);
    rhs(t0, y0, k1);
    traj.samples.push_back({t0, y0, k1});

    double t = t0;
    for (long s = 0; s < steps; ++s) {
        try {
            for (std::size_t i = 0; i < n; ++i) work[i] = y0[i] + 0.5 * h * k1[i];
            rhs(t + 0.5 * h, work, k2);
            for (std::size_t i = 0; i < n; ++i) work[i] = y0[i] + 0.5 * h * k2[i];
            rhs(t + 0.5 * h, work, k3);
            for (std::size_t i = 0; i < n; ++i) work[i] = y0[i] + h * k3[i];
            rhs(t + h, work, k4);
            for (std::size_t i = 0; i < n; ++i)
                y0[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            t = t0 + h * static_cast<double>(s + 1);
            rhs(t, y0, k1);
        } catch (const DomainError&) {
            traj.status = TrajectoryStatus::StepFailure;
            return traj;
        }
        for (double v : y0)
            if (!std::isfinite(v)) {
                traj.status = TrajectoryStatus::StepFailure;
                return traj;
            }
        traj.samples.push_back({t, y0, k1});
        ++traj.steps_accepted;
    }
    return traj;
}

}  // namespace

Trajectory integrate_ode(const OdeRhs& rhs, double t0, std::vector<double> y0,
                         const IntegratorConfig& cfg) {
    if (cfg.abs_tol <= 0.0 || cfg.rel_tol <= 0.0)
        throw DimensionMismatch("integrator tolerances must be positive");
    if (cfg.window <= 0.0 || cfg.max_step <= 0.0)
        throw DimensionMismatch("integrator window and max_step must be positive");
    if (cfg.method == IntegratorMethod::RK4Fixed) return integrate_rk4(rhs, t0, y0, cfg);
    return integrate_rk45(rhs, t0, y0, cfg);
}

// ============================================================================
// Dynamic and geodesic flows
// ============================================================================

Trajectory integrate_sode(const DynamicEquation& eq, const JetPoint& p0,
                          const IntegratorConfig& cfg) {
    const int m = eq.dim;
    if (p0.dim() != m) throw DimensionMismatch("initial point dimension mismatch");
    for (double x : p0.q)
        if (!std::isfinite(x)) throw DimensionMismatch("non-finite initial data");
    for (double x : p0.v)
        if (!std::isfinite(x)) throw DimensionMismatch("non-finite initial data");

    std::vector<double> y0;
    y0.insert(y0.end(), p0.q.begin(), p0.q.end());
    y0.insert(y0.end(), p0.v.begin(), p0.v.end());

    Point p;
    p.q.resize(m);
    p.v.resize(m);
    OdeRhs rhs = [&eq, m, p](double t, const std::vector<double>& y,
                             std::vector<double>& out) mutable {
        p.t = t;
        for (int i = 0; i < m; ++i) {
            p.q[i] = y[i];
            p.v[i] = y[m + i];
        }
        for (int i = 0; i < m; ++i) {
            out[i] = y[m + i];
            out[m + i] = eq.xi[i].eval(p);
        }
    };

    Trajectory traj = integrate_ode(rhs, p0.t, std::move(y0), cfg);
    traj.columns.push_back("t");
    for (int i = 1; i <= m; ++i) traj.columns.push_back("q" + std::to_string(i));
    for (int i = 1; i <= m; ++i) traj.columns.push_back("v" + std::to_string(i));
    return traj;
}

Trajectory integrate_geodesic(const TangentConnection& k, const TangentPoint& p0,
                              const IntegratorConfig& cfg) {
    const int m = k.dim;
    if (p0.dim() != m) throw DimensionMismatch("initial point dimension mismatch");
    for (double x : p0.x)
        if (!std::isfinite(x)) throw DimensionMismatch("non-finite initial data");
    for (double x : p0.xdot)
        if (!std::isfinite(x)) throw DimensionMismatch("non-finite initial data");

    bool trivial_time_row = true;
    for (int lambda = 0; lambda <= m; ++lambda)
        if (!is_zero(k.K[0][lambda].ast())) trivial_time_row = false;

    const int n = m + 1;
    std::vector<double> y0;
    y0.insert(y0.end(), p0.x.begin(), p0.x.end());
    y0.insert(y0.end(), p0.xdot.begin(), p0.xdot.end());

    Point p;
    p.q.resize(m);
    p.v.resize(m);
    OdeRhs rhs = [&k, m, n, p](double, const std::vector<double>& y,
                               std::vector<double>& out) mutable {
        p.t = y[0];
        p.vt = y[n];
        for (int i = 0; i < m; ++i) {
            p.q[i] = y[1 + i];
            p.v[i] = y[n + 1 + i];
        }
        for (int mu = 0; mu <= m; ++mu) {
            out[mu] = y[n + mu];
            double acc = 0.0;
            for (int lambda = 0; lambda <= m; ++lambda) {
                const double xdot_l = y[n + lambda];
                if (xdot_l != 0.0) acc += k.K[mu][lambda].eval(p) * xdot_l;
            }
            out[n + mu] = acc;
        }
    };

    Trajectory traj = integrate_ode(rhs, 0.0, std::move(y0), cfg);
    traj.columns.push_back("t");
    for (int i = 0; i <= m; ++i) traj.columns.push_back("x" + std::to_string(i));
    for (int i = 0; i <= m; ++i) traj.columns.push_back("xdot" + std::to_string(i));

    // On the affine subbundle the time fibre is exactly straight.
    if (trivial_time_row && std::abs(p0.xdot[0] - 1.0) < 1e-14)
        for (const auto& s : traj.samples)
            if (std::abs(s.state[n] - 1.0) > 1e-10)
                throw Error("xdot0 drifted on a temporally trivial connection");
    return traj;
}

// ============================================================================
// Comparison
// ============================================================================

TrajectoryProjection sode_projection(int m) {
    return {[](double t, const std::vector<double>&) { return t; },
            [m](double, const std::vector<double>& s) {
                return std::vector<double>(s.begin(), s.begin() + 2 * m);
            }};
}

TrajectoryProjection sode_position_projection(int m) {
    return {[](double t, const std::vector<double>&) { return t; },
            [m](double, const std::vector<double>& s) {
                return std::vector<double>(s.begin(), s.begin() + m);
            }};
}

TrajectoryProjection geodesic_jet_projection(int m) {
    return {[](double, const std::vector<double>& s) { return s[0]; },
            [m](double, const std::vector<double>& s) {
                std::vector<double> out(s.begin() + 1, s.begin() + 1 + m);
                out.insert(out.end(), s.begin() + m + 2, s.begin() + 2 * (m + 1));
                return out;
            }};
}

TrajectoryProjection geodesic_position_projection(int m) {
    return {[](double, const std::vector<double>& s) { return s[0]; },
            [m](double, const std::vector<double>& s) {
                return std::vector<double>(s.begin() + 1, s.begin() + 1 + m);
            }};
}

namespace {

double projected_time(const Trajectory& traj, const TrajectoryProjection& proj, double param) {
    std::vector<double> s = traj.state_at(param);
    return proj.time(param, s);
}

// Finds the curve parameter at which the projected time equals tau, assuming
// projected time increases along the trajectory.
double param_at_time(const Trajectory& traj, const TrajectoryProjection& proj, double tau) {
    double lo = traj.t_front();
    double hi = traj.t_back();
    double flo = projected_time(traj, proj, lo);
    double fhi = projected_time(traj, proj, hi);
    if (tau <= flo) return lo;
    if (tau >= fhi) return hi;
    for (int iter = 0; iter < 200 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (projected_time(traj, proj, mid) < tau)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double compare_trajectories(const Trajectory& a, const TrajectoryProjection& pa,
                            const Trajectory& b, const TrajectoryProjection& pb,
                            int grid) {
    if (a.samples.empty() || b.samples.empty()) throw TrajectoryMismatch("empty trajectory");

    auto time_range = [](const Trajectory& tr, const TrajectoryProjection& p) {
        double first = p.time(tr.samples.front().t, tr.samples.front().state);
        double last = p.time(tr.samples.back().t, tr.samples.back().state);
        if (!(last > first)) throw TrajectoryMismatch("projected time must increase");
        return std::pair<double, double>(first, last);
    };
    auto [a0, a1] = time_range(a, pa);
    auto [b0, b1] = time_range(b, pb);
    const double lo = std::max(a0, b0);
    const double hi = std::min(a1, b1);
    if (!(hi > lo)) throw NoOverlap("trajectories share no common time window");

    double worst = 0.0;
    for (int g = 0; g <= grid; ++g) {
        const double tau = lo + (hi - lo) * static_cast<double>(g) / grid;
        const double sa = param_at_time(a, pa, tau);
        const double sb = param_at_time(b, pb, tau);
        const std::vector<double> va = pa.value(sa, a.state_at(sa));
        const std::vector<double> vb = pb.value(sb, b.state_at(sb));
        if (va.size() != vb.size()) throw TrajectoryMismatch("projected state sizes differ");
        for (std::size_t i = 0; i < va.size(); ++i)
            worst = std::max(worst, std::abs(va[i] - vb[i]));
    }
    return worst;
}

}  // namespace jetflow
