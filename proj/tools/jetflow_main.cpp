#include <atomic>
#include <cstdint>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "jetflow/scenario.hpp"

namespace {

struct JobConfig {
    std::vector<std::string> scenario_files;
    std::string out_dir = ".";
    std::int64_t seed = -1;
    unsigned jobs = 1;
};

int classify_error(const jetflow::Error& e) {
    if (dynamic_cast<const jetflow::ParseError*>(&e) ||
        dynamic_cast<const jetflow::UnknownSymbol*>(&e) ||
        dynamic_cast<const jetflow::DimensionMismatch*>(&e))
        return 1;
    if (dynamic_cast<const jetflow::ChartNotAdapted*>(&e)) return 2;
    return 3;
}

const char* error_type(const jetflow::Error& e) {
    if (dynamic_cast<const jetflow::ParseError*>(&e)) return "ParseError";
    if (dynamic_cast<const jetflow::UnknownSymbol*>(&e)) return "UnknownSymbol";
    if (dynamic_cast<const jetflow::DimensionMismatch*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const jetflow::ChartNotAdapted*>(&e)) return "ChartNotAdapted";
    if (dynamic_cast<const jetflow::SingularJacobian*>(&e)) return "SingularJacobian";
    if (dynamic_cast<const jetflow::SingularMetric*>(&e)) return "SingularMetric";
    if (dynamic_cast<const jetflow::SingularMass*>(&e)) return "SingularMass";
    if (dynamic_cast<const jetflow::NotAffine*>(&e)) return "NotAffine";
    if (dynamic_cast<const jetflow::DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const jetflow::TrajectoryMismatch*>(&e)) return "TrajectoryMismatch";
    if (dynamic_cast<const jetflow::NoOverlap*>(&e)) return "NoOverlap";
    if (dynamic_cast<const jetflow::NoHyperboloidPoint*>(&e)) return "NoHyperboloidPoint";
    return "Error";
}

int run_one(const std::string& subcommand, const std::string& file, const JobConfig& cfg,
            std::mutex& io_mutex) {
    std::optional<std::uint64_t> seed;
    if (cfg.seed >= 0) seed = static_cast<std::uint64_t>(cfg.seed);
    try {
        const jetflow::Scenario scenario = jetflow::load_scenario(file);
        const jetflow::RunOutcome outcome =
            jetflow::run_subcommand(subcommand, scenario, cfg.out_dir, seed);
        std::lock_guard<std::mutex> lock(io_mutex);
        for (const auto& path : outcome.files_written)
            std::cout << "wrote " << path << "\n";
        return outcome.exit_code;
    } catch (const jetflow::Error& e) {
        jetflow::JsonValue err = jetflow::JsonValue::object();
        jetflow::JsonValue detail = jetflow::JsonValue::object();
        detail.set("type", error_type(e));
        detail.set("message", e.what());
        err.set("error", detail);
        err.set("scenario_file", file);
        err.set("subcommand", subcommand);
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cout << jetflow::to_json(err);
        return classify_error(e);
    } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io_mutex);
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

int run_all(const std::string& subcommand, const JobConfig& cfg) {
    std::mutex io_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<int> worst{0};
    const unsigned workers =
        std::max(1u, std::min<unsigned>(cfg.jobs, cfg.scenario_files.size()));

    auto worker = [&] {
        for (;;) {
            const std::size_t index = next.fetch_add(1);
            if (index >= cfg.scenario_files.size()) return;
            const int code = run_one(subcommand, cfg.scenario_files[index], cfg, io_mutex);
            int prev = worst.load();
            while (code > prev && !worst.compare_exchange_weak(prev, code)) {
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return worst.load();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jetflow: dynamic equations, jet-bundle connections and geodesic lifts"};
    app.require_subcommand(1);

    JobConfig cfg;
    std::string chosen;
    for (const std::string& name : jetflow::known_subcommands()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--scenario", cfg.scenario_files, "scenario JSON file(s)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "sampling seed (overrides the scenario)");
        sub->add_option("--jobs", cfg.jobs, "run scenarios concurrently");
        sub->callback([&chosen, name] { chosen = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return run_all(chosen, cfg);
}
