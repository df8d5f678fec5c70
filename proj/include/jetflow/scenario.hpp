#ifndef JETFLOW_SCENARIO_HPP
#define JETFLOW_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jetflow/frames.hpp"
#include "jetflow/integrate.hpp"
#include "jetflow/relativity.hpp"
#include "jetflow/report.hpp"

namespace jetflow {

struct LimitSpec {
    std::vector<double> u;
    std::vector<double> v_scales;
};

// A parsed scenario file: named geometric inputs plus run configuration.
struct Scenario {
    std::string name = "scenario";
    int dim = 0;
    std::optional<DynamicEquation> xi;
    std::optional<ReferenceFrame> frame;
    std::optional<ChartTransform> chart;
    std::optional<QuadraticLagrangian> lagrangian;
    std::optional<PseudoMetric> metric;
    std::optional<JetPoint> initial;
    std::optional<IntegratorConfig> integrator;
    std::optional<std::uint64_t> seed;
    std::optional<LimitSpec> limit;
};

Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::string& path);

struct RunOutcome {
    int exit_code = 0;
    JsonValue report;
    std::vector<std::string> files_written;
};

// Runs one subcommand against a scenario, writing the report (and any
// trajectory CSV) under out_dir. A seed given here overrides the scenario's.
RunOutcome run_subcommand(const std::string& subcommand, const Scenario& scenario,
                          const std::string& out_dir,
                          std::optional<std::uint64_t> seed_override);

const std::vector<std::string>& known_subcommands();

}  // namespace jetflow

#endif
