#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "jetflow/frames.hpp"
#include "jetflow/integrate.hpp"
#include "jetflow/parser.hpp"
#include "jetflow/relativity.hpp"
#include "jetflow/scenario.hpp"
#include "jetflow/tangent.hpp"

namespace py = pybind11;
using namespace jetflow;

namespace {

JetPoint make_jet(double t, const std::vector<double>& q, const std::vector<double>& v) {
    return JetPoint{t, q, v};
}

std::vector<ScalarField> parse_list(const std::vector<std::string>& texts, int dim) {
    std::vector<ScalarField> out;
    out.reserve(texts.size());
    for (const auto& text : texts) out.push_back(parse_field(text, dim));
    return out;
}

std::vector<std::vector<ScalarField>> parse_matrix(
    const std::vector<std::vector<std::string>>& texts, int dim) {
    std::vector<std::vector<ScalarField>> out;
    out.reserve(texts.size());
    for (const auto& row : texts) out.push_back(parse_list(row, dim));
    return out;
}

IntegratorConfig config_from_kwargs(const std::string& method, double abs_tol, double rel_tol,
                                    double max_step, double window) {
    IntegratorConfig cfg;
    cfg.method = (method == "rk4") ? IntegratorMethod::RK4Fixed : IntegratorMethod::RK45Adaptive;
    cfg.abs_tol = abs_tol;
    cfg.rel_tol = rel_tol;
    cfg.max_step = max_step;
    cfg.window = window;
    return cfg;
}

py::dict trajectory_dict(const Trajectory& traj) {
    py::list times, states;
    for (const auto& s : traj.samples) {
        times.append(s.t);
        states.append(s.state);
    }
    py::dict out;
    out["t"] = times;
    out["states"] = states;
    out["columns"] = traj.columns;
    out["status"] = traj.status == TrajectoryStatus::Complete ? "complete" : "step_failure";
    out["steps_accepted"] = traj.steps_accepted;
    return out;
}

}  // namespace

PYBIND11_MODULE(_jetflow, m) {
    m.doc() = "Dynamic equations, jet-bundle connections and geodesic lifts";

    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<ParseError>(m, "ExpressionParseError");
    py::register_exception<UnknownSymbol>(m, "UnknownSymbolError");
    py::register_exception<DimensionMismatch>(m, "DimensionMismatchError");

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init([](const std::string& text, int dim) { return parse_field(text, dim); }),
             py::arg("text"), py::arg("dim"))
        .def_property_readonly("dim", &ScalarField::dim)
        .def("__str__", &ScalarField::str)
        .def("__repr__", [](const ScalarField& f) { return "ScalarField(" + f.str() + ")"; })
        .def(
            "eval",
            [](const ScalarField& f, double t, const std::vector<double>& q,
               const std::vector<double>& v) { return f.eval(make_jet(t, q, v)); },
            py::arg("t"), py::arg("q"), py::arg("v"))
        .def("partial", [](const ScalarField& f, const std::string& name) {
            if (name == "t") return f.partial(sym_t());
            if (name.size() >= 2 && (name[0] == 'q' || name[0] == 'v')) {
                const int idx = std::atoi(name.c_str() + 1);
                return f.partial(name[0] == 'q' ? sym_q(idx) : sym_v(idx));
            }
            throw UnknownSymbol("unknown variable: " + name);
        });

    py::class_<DynamicEquation>(m, "DynamicEquation")
        .def(py::init([](const std::vector<std::string>& xi, int dim) {
                 return DynamicEquation(parse_list(xi, dim));
             }),
             py::arg("xi"), py::arg("dim"))
        .def_readonly("dim", &DynamicEquation::dim)
        .def_property_readonly("xi",
                               [](const DynamicEquation& eq) {
                                   std::vector<std::string> out;
                                   for (const auto& f : eq.xi) out.push_back(f.str());
                                   return out;
                               })
        .def("__repr__", [](const DynamicEquation& eq) {
            std::string out = "DynamicEquation([";
            for (int i = 0; i < eq.dim; ++i)
                out += (i ? ", " : "") + eq.xi[i].str();
            return out + "])";
        });

    py::class_<DynamicConnection>(m, "DynamicConnection")
        .def_readonly("dim", &DynamicConnection::dim)
        .def_property_readonly("gamma0",
                               [](const DynamicConnection& g) {
                                   std::vector<std::string> out;
                                   for (const auto& f : g.gamma0) out.push_back(f.str());
                                   return out;
                               })
        .def_property_readonly("gamma", [](const DynamicConnection& g) {
            std::vector<std::vector<std::string>> out;
            for (const auto& row : g.gamma) {
                std::vector<std::string> r;
                for (const auto& f : row) r.push_back(f.str());
                out.push_back(r);
            }
            return out;
        });

    py::class_<ChartTransform>(m, "ChartTransform")
        .def(py::init([](const std::vector<std::string>& forward,
                         const std::vector<std::string>& inverse, double time_shift) {
                 const int dim = static_cast<int>(forward.size());
                 return ChartTransform(parse_list(forward, dim), parse_list(inverse, dim),
                                       time_shift);
             }),
             py::arg("forward"), py::arg("inverse"), py::arg("time_shift") = 0.0);

    py::class_<ReferenceFrame>(m, "ReferenceFrame")
        .def(py::init([](const std::vector<std::string>& gamma, int dim) {
                 return ReferenceFrame(parse_list(gamma, dim));
             }),
             py::arg("gamma"), py::arg("dim"));

    py::class_<TangentConnection>(m, "TangentConnection")
        .def_readonly("dim", &TangentConnection::dim)
        .def_property_readonly("K", [](const TangentConnection& k) {
            std::vector<std::vector<std::string>> out;
            for (const auto& row : k.K) {
                std::vector<std::string> r;
                for (const auto& f : row) r.push_back(f.str());
                out.push_back(r);
            }
            return out;
        });

    m.def("connection_from_sode", &connection_from_sode, py::arg("equation"));
    m.def("sode_from_connection", &sode_from_connection, py::arg("connection"));
    m.def("resymmetrize", &resymmetrize, py::arg("connection"));
    m.def("vhat_oracle", &vhat_oracle, py::arg("equation"));
    m.def("transform_sode", &transform_sode, py::arg("equation"), py::arg("chart"));
    m.def("transform_connection", &transform_connection, py::arg("connection"),
          py::arg("chart"));

    m.def(
        "equation_difference",
        [](const DynamicEquation& a, const DynamicEquation& b, std::uint64_t seed, int count) {
            Sampler sampler(seed);
            return max_difference(a, b, sampler, count);
        },
        py::arg("a"), py::arg("b"), py::arg("seed") = 0, py::arg("count") = 200);
    m.def(
        "connection_difference",
        [](const DynamicConnection& a, const DynamicConnection& b, std::uint64_t seed,
           int count) {
            Sampler sampler(seed);
            return max_difference(a, b, sampler, count);
        },
        py::arg("a"), py::arg("b"), py::arg("seed") = 0, py::arg("count") = 200);

    m.def(
        "lift_to_tangent",
        [](const DynamicConnection& g, const std::string& mode, std::uint64_t seed) {
            Sampler sampler(seed);
            const LiftMode lift_mode =
                (mode == "linear") ? LiftMode::LinearIfAffine : LiftMode::Substitution;
            return lift_to_tangent(g, lift_mode, sampler);
        },
        py::arg("connection"), py::arg("mode") = "substitution", py::arg("seed") = 0);

    m.def(
        "is_free_motion_candidate",
        [](const DynamicEquation& eq, std::uint64_t seed) {
            Sampler sampler(seed);
            const FreeMotionReport r = is_free_motion_candidate(eq, sampler);
            py::dict out;
            out["quadratic"] = r.quadratic;
            out["flat"] = r.flat;
            out["candidate"] = r.candidate;
            out["max_curvature"] = r.max_curvature;
            return out;
        },
        py::arg("equation"), py::arg("seed"));

    m.def(
        "relative_acceleration",
        [](const DynamicEquation& eq, const ReferenceFrame& frame) {
            std::vector<std::string> out;
            for (const auto& f : relative_acceleration(eq, frame)) out.push_back(f.str());
            return out;
        },
        py::arg("equation"), py::arg("frame"));

    m.def(
        "integrate_sode",
        [](const DynamicEquation& eq, double t, const std::vector<double>& q,
           const std::vector<double>& v, const std::string& method, double abs_tol,
           double rel_tol, double max_step, double window) {
            return trajectory_dict(integrate_sode(
                eq, make_jet(t, q, v),
                config_from_kwargs(method, abs_tol, rel_tol, max_step, window)));
        },
        py::arg("equation"), py::arg("t") = 0.0, py::arg("q"), py::arg("v"),
        py::arg("method") = "rk45", py::arg("abs_tol") = 1e-10, py::arg("rel_tol") = 1e-10,
        py::arg("max_step") = 0.1, py::arg("window") = 5.0);

    m.def(
        "geodesic_deviation",
        [](const DynamicEquation& eq, double t, const std::vector<double>& q,
           const std::vector<double>& v, double window) {
            Sampler sampler(0);
            IntegratorConfig cfg;
            cfg.window = window;
            const TangentConnection k =
                lift_to_tangent(connection_from_sode(eq), LiftMode::Substitution, sampler);
            const JetPoint p0 = make_jet(t, q, v);
            const Trajectory sode = integrate_sode(eq, p0, cfg);
            const Trajectory geo = integrate_geodesic(k, lift_point(p0), cfg);
            return compare_trajectories(sode, sode_projection(eq.dim), geo,
                                        geodesic_jet_projection(eq.dim));
        },
        py::arg("equation"), py::arg("t"), py::arg("q"), py::arg("v"),
        py::arg("window") = 5.0);

    m.def(
        "lagrange_sode",
        [](const std::vector<std::vector<std::string>>& mass, const std::vector<std::string>& k,
           const std::string& f, std::uint64_t seed) {
            const int dim = static_cast<int>(mass.size());
            const QuadraticLagrangian lagrangian(parse_matrix(mass, dim), parse_list(k, dim),
                                                 parse_field(f, dim));
            Sampler sampler(seed);
            return lagrange_sode(lagrangian, sampler);
        },
        py::arg("mass"), py::arg("k"), py::arg("f"), py::arg("seed") = 0);

    m.def(
        "relativize",
        [](const DynamicEquation& eq, const std::vector<std::vector<std::string>>& metric,
           std::uint64_t seed) {
            const int dim = eq.dim;
            const PseudoMetric g(dim, parse_matrix(metric, dim));
            Sampler sampler(seed);
            const QuadraticExtraction quad = as_quadratic(eq, sampler);
            py::dict out;
            if (!quad.quadratic) {
                out["verdict"] = "not_quadratic";
                return out;
            }
            const RelativizeResult r = relativize(*quad.value, g, sampler);
            switch (r.verdict) {
                case RelativizeResult::Verdict::LorentzType:
                    out["verdict"] = "lorentz_type";
                    out["hyperboloid_residual"] = r.hyperboloid_residual;
                    break;
                case RelativizeResult::Verdict::NotLorentzType:
                    out["verdict"] = "not_lorentz_type";
                    out["max_symmetric_part"] = r.max_symmetric_part;
                    break;
                case RelativizeResult::Verdict::NotQuadraticResidual:
                    out["verdict"] = "not_quadratic_residual";
                    break;
            }
            return out;
        },
        py::arg("equation"), py::arg("metric"), py::arg("seed"));

    m.def(
        "run_scenario",
        [](const std::string& subcommand, const std::string& scenario_json,
           const std::string& out_dir, std::uint64_t seed) {
            const Scenario scenario = parse_scenario(scenario_json);
            const RunOutcome outcome = run_subcommand(subcommand, scenario, out_dir, seed);
            py::dict out;
            out["exit_code"] = outcome.exit_code;
            out["files"] = outcome.files_written;
            out["report_json"] = to_json(outcome.report);
            return out;
        },
        py::arg("subcommand"), py::arg("scenario_json"), py::arg("out_dir") = ".",
        py::arg("seed") = 0);
}
