#include "jetflow/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jetflow/parser.hpp"
#include <json.hpp>

namespace jetflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail_parse(const std::string& msg) { throw ParseError(msg, 0, 0); }

std::pair<int, int> line_col_of_offset(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

ScalarField field_of(const json& j, int dim, const std::string& where) {
    if (!j.is_string()) fail_parse(where + " must be an expression string");
    return parse_field(j.get<std::string>(), dim);
}

std::vector<ScalarField> field_list(const json& j, int dim, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        throw DimensionMismatch(where + " must list exactly " + std::to_string(dim) +
                                " expressions");
    std::vector<ScalarField> out;
    for (const auto& item : j) out.push_back(field_of(item, dim, where));
    return out;
}

std::vector<std::vector<ScalarField>> field_matrix(const json& j, int dim, int rows, int cols,
                                                   const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != rows)
        throw DimensionMismatch(where + " must be a " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " matrix of expressions");
    std::vector<std::vector<ScalarField>> out;
    for (const auto& row : j) {
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            throw DimensionMismatch(where + " must be a " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + " matrix of expressions");
        std::vector<ScalarField> r;
        for (const auto& item : row) r.push_back(field_of(item, dim, where));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<double> number_list(const json& j, int count, const std::string& where) {
    if (!j.is_array() || static_cast<int>(j.size()) != count)
        throw DimensionMismatch(where + " must list exactly " + std::to_string(count) +
                                " numbers");
    std::vector<double> out;
    for (const auto& item : j) {
        if (!item.is_number()) fail_parse(where + " entries must be numbers");
        out.push_back(item.get<double>());
    }
    return out;
}

IntegratorConfig integrator_of(const json& j) {
    IntegratorConfig cfg;
    if (!j.is_object()) fail_parse("integrator must be an object");
    const std::string method = j.value("method", "rk45");
    if (method == "rk45")
        cfg.method = IntegratorMethod::RK45Adaptive;
    else if (method == "rk4")
        cfg.method = IntegratorMethod::RK4Fixed;
    else
        fail_parse("integrator.method must be rk45 or rk4");
    cfg.abs_tol = j.value("abs_tol", 1e-10);
    cfg.rel_tol = j.value("rel_tol", 1e-10);
    cfg.max_step = j.value("max_step", 0.1);
    cfg.window = j.value("window", 5.0);
    if (cfg.abs_tol <= 0 || cfg.rel_tol <= 0) fail_parse("integrator tolerances must be > 0");
    if (cfg.max_step <= 0 || cfg.window <= 0)
        fail_parse("integrator max_step and window must be > 0");
    return cfg;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [line, col] = line_col_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what(), line, col);
    }
    if (!j.is_object()) fail_parse("scenario must be a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        fail_parse("scenario needs an integer dim");

    Scenario s;
    s.name = name;
    s.dim = j["dim"].get<int>();
    if (s.dim < 1) throw DimensionMismatch("dim must be >= 1");
    const int m = s.dim;

    try {
        if (j.contains("xi")) s.xi = DynamicEquation(field_list(j["xi"], m, "xi"));
        if (j.contains("frame")) s.frame = ReferenceFrame(field_list(j["frame"], m, "frame"));
        if (j.contains("chart")) {
            const json& c = j["chart"];
            if (!c.is_object() || !c.contains("forward") || !c.contains("inverse"))
                fail_parse("chart needs forward and inverse expression lists");
            s.chart = ChartTransform(field_list(c["forward"], m, "chart.forward"),
                                     field_list(c["inverse"], m, "chart.inverse"),
                                     c.value("time_shift", 0.0));
        }
        if (j.contains("lagrangian")) {
            const json& l = j["lagrangian"];
            if (!l.is_object() || !l.contains("mass") || !l.contains("f"))
                fail_parse("lagrangian needs mass and f");
            std::vector<ScalarField> k(m, ScalarField::constant(m, 0.0));
            if (l.contains("k")) k = field_list(l["k"], m, "lagrangian.k");
            s.lagrangian = QuadraticLagrangian(
                field_matrix(l["mass"], m, m, m, "lagrangian.mass"), std::move(k),
                field_of(l["f"], m, "lagrangian.f"));
            Sampler check(0);
            if (!mass_positive_definite(*s.lagrangian, check, 50))
                throw DimensionMismatch("lagrangian mass tensor must be positive-definite");
        }
        if (j.contains("metric")) {
            s.metric = PseudoMetric(m, field_matrix(j["metric"], m, m + 1, m + 1, "metric"));
            Sampler check(0);
            if (metric_symmetry_residual(*s.metric, check, 50) > 1e-12)
                throw DimensionMismatch("metric must be symmetric");
        }
        if (j.contains("initial")) {
            const json& p = j["initial"];
            if (!p.is_object() || !p.contains("q") || !p.contains("v"))
                fail_parse("initial needs q and v lists");
            JetPoint jp;
            jp.t = p.value("t", 0.0);
            jp.q = number_list(p["q"], m, "initial.q");
            jp.v = number_list(p["v"], m, "initial.v");
            s.initial = jp;
        }
        if (j.contains("integrator")) s.integrator = integrator_of(j["integrator"]);
        if (j.contains("seed")) {
            if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
                fail_parse("seed must be a non-negative integer");
            s.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("limit")) {
            const json& l = j["limit"];
            if (!l.is_object() || !l.contains("u") || !l.contains("v_scales"))
                fail_parse("limit needs u and v_scales");
            LimitSpec spec;
            spec.u = number_list(l["u"], m, "limit.u");
            if (!l["v_scales"].is_array() || l["v_scales"].empty())
                fail_parse("limit.v_scales must be a non-empty list");
            for (const auto& v : l["v_scales"]) spec.v_scales.push_back(v.get<double>());
            s.limit = spec;
        }
    } catch (const json::exception& e) {
        fail_parse(std::string("malformed scenario: ") + e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    std::string stem = path;
    if (auto slash = stem.find_last_of("/\\"); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    return parse_scenario(buf.str(), stem);
}

// ============================================================================
// Subcommands
// ============================================================================

namespace {

const DynamicEquation& need_xi(const Scenario& s) {
    if (!s.xi) fail_parse("this subcommand needs a dynamic equation (xi)");
    return *s.xi;
}

const JetPoint& need_initial(const Scenario& s) {
    if (!s.initial) fail_parse("this subcommand needs initial conditions");
    return *s.initial;
}

IntegratorConfig need_integrator(const Scenario& s) {
    if (!s.integrator) fail_parse("this subcommand needs an integrator section");
    return *s.integrator;
}

std::uint64_t need_seed(const Scenario& s, const std::optional<std::uint64_t>& override_seed) {
    if (override_seed) return *override_seed;
    if (s.seed) return *s.seed;
    fail_parse("this subcommand needs a sampling seed (--seed or scenario \"seed\")");
}

PseudoMetric resolve_metric(const Scenario& s, Sampler& sampler, JsonValue& residuals,
                            JsonValue& verdicts) {
    if (s.metric) {
        const double det = min_metric_determinant(*s.metric, sampler);
        residuals.set("min_metric_det", det);
        verdicts.set("metric_degenerate", det < 1e-10);
        return *s.metric;
    }
    if (s.lagrangian) {
        MetricFromLagrangian built = metric_from_lagrangian(*s.lagrangian, sampler);
        residuals.set("min_metric_det", built.min_abs_det);
        verdicts.set("metric_degenerate", built.degenerate);
        return built.metric;
    }
    fail_parse("this subcommand needs a metric or a lagrangian");
}

JsonValue expressions_of(const std::vector<ScalarField>& fields) {
    JsonValue arr = JsonValue::array();
    for (const auto& f : fields) arr.push(f.str());
    return arr;
}

JsonValue expressions_of(const std::vector<std::vector<ScalarField>>& matrix) {
    JsonValue arr = JsonValue::array();
    for (const auto& row : matrix) arr.push(expressions_of(row));
    return arr;
}

JsonValue echo_config(const Scenario& s, std::optional<std::uint64_t> seed) {
    JsonValue echo = JsonValue::object();
    echo.set("scenario", s.name);
    echo.set("dim", s.dim);
    if (seed)
        echo.set("seed", static_cast<long long>(*seed));
    else
        echo.set("seed", JsonValue());
    if (s.integrator) {
        JsonValue integ = JsonValue::object();
        integ.set("method",
                  s.integrator->method == IntegratorMethod::RK4Fixed ? "rk4" : "rk45");
        integ.set("abs_tol", s.integrator->abs_tol);
        integ.set("rel_tol", s.integrator->rel_tol);
        integ.set("max_step", s.integrator->max_step);
        integ.set("window", s.integrator->window);
        echo.set("integrator", integ);
    }
    return echo;
}

JsonValue equation_ids(std::initializer_list<const char*> ids) {
    JsonValue arr = JsonValue::array();
    for (const char* id : ids) arr.push(id);
    return arr;
}

std::vector<std::vector<double>> csv_rows(const Trajectory& traj) {
    std::vector<std::vector<double>> rows;
    for (const auto& s : traj.samples) {
        std::vector<double> row;
        row.push_back(s.t);
        row.insert(row.end(), s.state.begin(), s.state.end());
        rows.push_back(std::move(row));
    }
    return rows;
}

struct ReportBuilder {
    JsonValue report = JsonValue::object();
    JsonValue verdicts = JsonValue::object();
    JsonValue residuals = JsonValue::object();
    JsonValue extra = JsonValue::object();

    ReportBuilder(const std::string& subcommand, std::initializer_list<const char*> ids) {
        report.set("subcommand", subcommand);
        report.set("equation_ids", equation_ids(ids));
    }

    JsonValue finish(const Scenario& s, std::optional<std::uint64_t> seed) {
        report.set("verdicts", verdicts);
        report.set("residuals", residuals);
        for (auto& member : extra.members) report.set(member.first, std::move(member.second));
        report.set("config_echo", echo_config(s, seed));
        return report;
    }
};

RunOutcome run_integrate(const Scenario& s, const std::string& out_dir,
                         std::optional<std::uint64_t> seed) {
    ReportBuilder rb("integrate", {"z273"});
    const Trajectory traj = integrate_sode(need_xi(s), need_initial(s), need_integrator(s));
    const bool complete = traj.status == TrajectoryStatus::Complete;
    rb.verdicts.set("status", complete ? "complete" : "step_failure");
    rb.residuals.set("final_time", traj.t_back());
    rb.residuals.set("steps_accepted", static_cast<long long>(traj.steps_accepted));
    rb.residuals.set("steps_rejected", static_cast<long long>(traj.steps_rejected));

    RunOutcome out;
    const std::string csv_path = out_dir + "/" + s.name + ".integrate.csv";
    write_csv_file(csv_path, traj.columns, csv_rows(traj));
    out.files_written.push_back(csv_path);
    out.report = rb.finish(s, seed);
    out.exit_code = complete ? 0 : 3;
    return out;
}

RunOutcome run_geodesic(const Scenario& s, const std::string& out_dir,
                        std::optional<std::uint64_t> seed) {
    ReportBuilder rb("geodesic", {"z294", "cqg11", "gm340", "jp50"});
    const DynamicEquation& xi = need_xi(s);
    const JetPoint& p0 = need_initial(s);
    const IntegratorConfig cfg = need_integrator(s);
    Sampler sampler(seed ? *seed : s.seed.value_or(0));

    const TangentConnection k =
        lift_to_tangent(connection_from_sode(xi), LiftMode::Substitution, sampler);
    const Trajectory geo = integrate_geodesic(k, lift_point(p0), cfg);
    const Trajectory sode = integrate_sode(xi, p0, cfg);

    double xdot0_drift = 0.0;
    const int n = xi.dim + 1;
    for (const auto& sample : geo.samples)
        xdot0_drift = std::max(xdot0_drift, std::abs(sample.state[n] - 1.0));

    const bool complete = geo.status == TrajectoryStatus::Complete &&
                          sode.status == TrajectoryStatus::Complete;
    rb.verdicts.set("status", complete ? "complete" : "step_failure");
    if (complete)
        rb.residuals.set("jp50_deviation",
                         compare_trajectories(sode, sode_projection(xi.dim), geo,
                                              geodesic_jet_projection(xi.dim)));
    rb.residuals.set("xdot0_drift", xdot0_drift);

    RunOutcome out;
    const std::string csv_path = out_dir + "/" + s.name + ".geodesic.csv";
    write_csv_file(csv_path, geo.columns, csv_rows(geo));
    out.files_written.push_back(csv_path);
    out.report = rb.finish(s, seed);
    out.exit_code = complete ? 0 : 3;
    return out;
}

RunOutcome run_lift(const Scenario& s, const std::string&, std::optional<std::uint64_t> seed) {
    ReportBuilder rb("lift", {"z286", "z281", "z294", "cqg13"});
    const DynamicEquation& xi = need_xi(s);
    const std::uint64_t seed_value = need_seed(s, seed);
    Sampler sampler(seed_value);

    const DynamicConnection gamma = connection_from_sode(xi);
    const TangentConnection k = lift_to_tangent(gamma, LiftMode::Substitution, sampler);

    JsonValue expressions = JsonValue::object();
    expressions.set("gamma0", expressions_of(gamma.gamma0));
    expressions.set("gamma", expressions_of(gamma.gamma));
    expressions.set("K", expressions_of(k.K));

    QuadraticExtraction quad = as_quadratic(xi, sampler);
    rb.verdicts.set("quadratic", quad.quadratic ? "yes" : "no");
    if (quad.quadratic) {
        const LinearTangentConnection linear = quadratic_to_linear(*quad.value);
        JsonValue lin = JsonValue::array();
        for (const auto& block : linear.coeffs) lin.push(expressions_of(block));
        expressions.set("linear_coefficients", lin);
    }
    rb.extra.set("expressions", expressions);

    // Sampled values of the connection at reproducible points.
    JsonValue table = JsonValue::array();
    Sampler table_sampler(seed_value);
    for (int row = 0; row < 5; ++row) {
        const JetPoint p = table_sampler.next_jet(xi.dim);
        JsonValue entry = JsonValue::object();
        JsonValue point = JsonValue::object();
        point.set("t", p.t);
        JsonValue qs = JsonValue::array();
        for (double x : p.q) qs.push(x);
        JsonValue vs = JsonValue::array();
        for (double x : p.v) vs.push(x);
        point.set("q", qs);
        point.set("v", vs);
        entry.set("point", point);
        JsonValue g0 = JsonValue::array();
        for (const auto& f : gamma.gamma0) g0.push(f.eval(p));
        entry.set("gamma0", g0);
        JsonValue gj = JsonValue::array();
        for (const auto& row_fields : gamma.gamma) {
            JsonValue r = JsonValue::array();
            for (const auto& f : row_fields) r.push(f.eval(p));
            gj.push(r);
        }
        entry.set("gamma", gj);
        table.push(entry);
    }
    rb.extra.set("sampled_table", table);

    rb.residuals.set("max_third_vertical_derivative", quad.max_third_vertical_derivative);
    RunOutcome out;
    out.report = rb.finish(s, seed ? seed : s.seed);
    return out;
}

RunOutcome run_transform(const Scenario& s, const std::string&,
                         std::optional<std::uint64_t> seed) {
    ReportBuilder rb("transform", {"z317", "m175", "z293"});
    const DynamicEquation& xi = need_xi(s);
    if (!s.chart) fail_parse("transform needs a chart");
    const std::uint64_t seed_value = need_seed(s, seed);
    Sampler sampler(seed_value);

    const ChartValidation chart_check = validate_chart(*s.chart, sampler, 100);
    if (chart_check.min_abs_jacobian_det < 1e-12)
        throw SingularJacobian("chart Jacobian degenerate on the sampled domain");
    const DynamicEquation xi_primed = transform_sode(xi, *s.chart);
    const DynamicConnection gamma = connection_from_sode(xi);
    const DynamicConnection gamma_primed = transform_connection(gamma, *s.chart);

    const double square_m175 =
        max_difference(gamma_primed, connection_from_sode(xi_primed), sampler);
    const TangentConnection k = lift_to_tangent(gamma, LiftMode::Substitution, sampler);
    const TangentConnection k_primed = transform_tangent_connection(k, *s.chart);
    const double square_z293 =
        max_difference(restrict_to_jet(k_primed), gamma_primed, sampler);

    JsonValue expressions = JsonValue::object();
    expressions.set("xi_primed", expressions_of(xi_primed.xi));
    expressions.set("gamma0_primed", expressions_of(gamma_primed.gamma0));
    expressions.set("gamma_primed", expressions_of(gamma_primed.gamma));
    rb.extra.set("expressions", expressions);

    rb.residuals.set("chart_round_trip", chart_check.max_round_trip_error);
    rb.residuals.set("min_jacobian_det", chart_check.min_abs_jacobian_det);
    rb.residuals.set("commuting_square_m175", square_m175);
    rb.residuals.set("commuting_square_z293", square_z293);
    rb.verdicts.set("covariant", square_m175 < 1e-8 && square_z293 < 1e-8 ? "yes" : "no");

    RunOutcome out;
    out.report = rb.finish(s, seed ? seed : s.seed);
    return out;
}

RunOutcome run_frames(const Scenario& s, const std::string&,
                      std::optional<std::uint64_t> seed) {
    ReportBuilder rb("frames", {"jp68", "jp64", "7.10"});
    const DynamicEquation& xi = need_xi(s);
    if (!s.frame) fail_parse("frames needs a frame section");
    const std::uint64_t seed_value = need_seed(s, seed);
    Sampler sampler(seed_value);

    const DynamicConnection gamma = connection_from_sode(xi);
    const FrameConnection fc = frame_connection(gamma, *s.frame);
    const DynamicEquation lifted = frame_lift(gamma, *s.frame);
    const std::vector<ScalarField> accel = relative_acceleration(xi, *s.frame);

    JsonValue expressions = JsonValue::object();
    expressions.set("frame_gamma0", expressions_of(fc.connection.gamma0));
    expressions.set("frame_gamma", expressions_of(fc.connection.gamma));
    expressions.set("xi_frame", expressions_of(lifted.xi));
    expressions.set("relative_acceleration", expressions_of(accel));
    rb.extra.set("expressions", expressions);

    // xi_Gamma composed with the frame equals d_t Gamma there.
    double lift_residual = 0.0;
    for (int i = 0; i < xi.dim; ++i) {
        ScalarField dt_gamma = s.frame->Gamma[i].partial(sym_t());
        for (int j = 1; j <= xi.dim; ++j)
            dt_gamma = dt_gamma +
                       ScalarField::velocity(xi.dim, j) * s.frame->Gamma[i].partial(sym_q(j));
        const ScalarField residual =
            compose_with_frame(lifted.xi[i] - dt_gamma, *s.frame);
        lift_residual = std::max(lift_residual, max_value(residual, sampler, 200));
    }
    rb.residuals.set("xi_frame_on_frame_minus_dt", lift_residual);

    const double frame_size = [&] {
        double worst = 0.0;
        for (const auto& f : s.frame->Gamma)
            worst = std::max(worst, max_value(f, sampler, 200));
        return worst;
    }();
    if (frame_size < 1e-12) {
        const std::vector<ScalarField> proper = relative_acceleration_proper(xi);
        double jp64_residual = 0.0;
        const DynamicEquation general_lift = frame_lift(gamma, *s.frame);
        for (int i = 0; i < xi.dim; ++i)
            jp64_residual = std::max(
                jp64_residual,
                jetflow::max_difference(xi.xi[i] - general_lift.xi[i], proper[i], sampler, 200));
        rb.residuals.set("jp64_vs_general", jp64_residual);
    }

    if (s.initial && s.integrator) {
        const Trajectory traj = integrate_sode(xi, *s.initial, *s.integrator);
        if (traj.status == TrajectoryStatus::Complete)
            rb.residuals.set("covariant_residual",
                             vertical_covariant_residual(xi, *s.frame, traj));
        rb.verdicts.set("status", traj.status == TrajectoryStatus::Complete
                                      ? "complete"
                                      : "step_failure");
    }

    RunOutcome out;
    out.report = rb.finish(s, seed ? seed : s.seed);
    return out;
}

RunOutcome run_flatness(const Scenario& s, const std::string&,
                        std::optional<std::uint64_t> seed) {
    ReportBuilder rb("flatness", {"cqg12", "cqg13", "gena110"});
    const DynamicEquation& xi = need_xi(s);
    Sampler sampler(need_seed(s, seed));

    const FreeMotionReport report = is_free_motion_candidate(xi, sampler);
    rb.verdicts.set("quadratic", report.quadratic ? "yes" : "no");
    rb.verdicts.set("flat", report.quadratic ? (report.flat ? "yes" : "no") : "n/a");
    rb.verdicts.set("free_motion_candidate", report.candidate ? "yes" : "no");
    rb.residuals.set("maxR", report.max_curvature);
    rb.residuals.set("max_third_vertical_derivative", report.max_third_vertical_derivative);

    RunOutcome out;
    out.report = rb.finish(s, seed ? seed : s.seed);
    return out;
}

RunOutcome run_relativize(const Scenario& s, const std::string&,
                          std::optional<std::uint64_t> seed) {
    ReportBuilder rb("relativize", {"cqg21", "cqg35", "cqg46", "cqg61", "cqg73"});
    const DynamicEquation& xi = need_xi(s);
    Sampler sampler(need_seed(s, seed));

    PseudoMetric metric = resolve_metric(s, sampler, rb.residuals, rb.verdicts);
    JsonValue expressions = JsonValue::object();
    expressions.set("metric", expressions_of(metric.g));
    {
        const auto lower = christoffel_lower(metric);
        JsonValue chris = JsonValue::array();
        for (const auto& block : lower) chris.push(expressions_of(block));
        expressions.set("christoffel_lower", chris);
    }
    rb.extra.set("expressions", expressions);

    QuadraticExtraction quad = as_quadratic(xi, sampler);
    rb.residuals.set("max_third_vertical_derivative", quad.max_third_vertical_derivative);
    RunOutcome out;
    if (!quad.quadratic) {
        rb.verdicts.set("lorentz_type", "not_quadratic");
        out.report = rb.finish(s, seed ? seed : s.seed);
        out.exit_code = 2;
        return out;
    }

    const RelativizeResult result = relativize(*quad.value, metric, sampler);
    rb.residuals.set("max_symmetric_part", result.max_symmetric_part);
    rb.residuals.set("max_second_vertical_derivative",
                     result.max_second_vertical_derivative);
    switch (result.verdict) {
        case RelativizeResult::Verdict::LorentzType: {
            rb.verdicts.set("lorentz_type", "yes");
            rb.residuals.set("hyperboloid_residual", result.hyperboloid_residual);
            JsonValue force = expressions_of(result.force);
            rb.extra.set("force", force);
            out.exit_code = 0;
            break;
        }
        case RelativizeResult::Verdict::NotLorentzType:
            rb.verdicts.set("lorentz_type", "no");
            out.exit_code = 2;
            break;
        case RelativizeResult::Verdict::NotQuadraticResidual:
            rb.verdicts.set("lorentz_type", "not_quadratic_residual");
            out.exit_code = 2;
            break;
    }
    out.report = rb.finish(s, seed ? seed : s.seed);
    return out;
}

RunOutcome run_limit(const Scenario& s, const std::string&, std::optional<std::uint64_t> seed) {
    ReportBuilder rb("limit", {"cqg51", "jp70", "jp71", "cqg70"});
    if (!s.limit) fail_parse("limit needs a limit section (u, v_scales)");
    const JetPoint& p0 = need_initial(s);
    const IntegratorConfig cfg = need_integrator(s);
    Sampler sampler(need_seed(s, seed));
    PseudoMetric metric = resolve_metric(s, sampler, rb.residuals, rb.verdicts);

    JsonValue errors = JsonValue::array();
    std::vector<double> values;
    for (double scale : s.limit->v_scales) {
        const LimitComparison cmp =
            nonrel_limit_compare(metric, p0.q, s.limit->u, scale, sampler, cfg);
        JsonValue entry = JsonValue::object();
        entry.set("v_scale", cmp.v_scale);
        entry.set("max_position_error", cmp.max_position_error);
        entry.set("relative_position_error", cmp.relative_position_error);
        errors.push(entry);
        values.push_back(cmp.relative_position_error);
    }
    rb.extra.set("sweep", errors);
    JsonValue ratios = JsonValue::array();
    for (std::size_t i = 1; i < values.size(); ++i)
        ratios.push(values[i - 1] == 0.0 ? 0.0 : values[i] / values[i - 1]);
    rb.extra.set("error_ratios", ratios);

    RunOutcome out;
    out.report = rb.finish(s, seed ? seed : s.seed);
    return out;
}

}  // namespace

const std::vector<std::string>& known_subcommands() {
    static const std::vector<std::string> names = {"integrate", "lift",     "geodesic",
                                                   "transform", "frames",   "flatness",
                                                   "relativize", "limit"};
    return names;
}

RunOutcome run_subcommand(const std::string& subcommand, const Scenario& scenario,
                          const std::string& out_dir,
                          std::optional<std::uint64_t> seed_override) {
    std::error_code ignored;
    std::filesystem::create_directories(out_dir, ignored);
    RunOutcome out;
    if (subcommand == "integrate")
        out = run_integrate(scenario, out_dir, seed_override);
    else if (subcommand == "geodesic")
        out = run_geodesic(scenario, out_dir, seed_override);
    else if (subcommand == "lift")
        out = run_lift(scenario, out_dir, seed_override);
    else if (subcommand == "transform")
        out = run_transform(scenario, out_dir, seed_override);
    else if (subcommand == "frames")
        out = run_frames(scenario, out_dir, seed_override);
    else if (subcommand == "flatness")
        out = run_flatness(scenario, out_dir, seed_override);
    else if (subcommand == "relativize")
        out = run_relativize(scenario, out_dir, seed_override);
    else if (subcommand == "limit")
        out = run_limit(scenario, out_dir, seed_override);
    else
        fail_parse("unknown subcommand: " + subcommand);

    const std::string report_path =
        out_dir + "/" + scenario.name + "." + subcommand + ".report.json";
    write_text_file(report_path, to_json(out.report));
    out.files_written.push_back(report_path);
    return out;
}

}  // namespace jetflow
