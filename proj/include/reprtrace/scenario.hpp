#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "reprtrace/simulator.hpp"

namespace reprtrace {

// Everything a run or comparison needs. Every command-line flag has a key
// here; flags override what the file says.
struct Scenario {
    sim::AppModel model;
    WorkloadSpec workload;
    SamplerConfig sampler;

    StrategyKind strategy = StrategyKind::ADP;
    std::uint64_t seed = 1;
    std::vector<StrategyKind> strategies{kAllStrategies.begin(), kAllStrategies.end()};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::string out = "results";
    bool strict = false;

    sim::RunSpec run_spec(StrategyKind kind, std::uint64_t run_seed) const;

    // Cross-field checks; throws ConfigError (line 0).
    void validate(const std::string& source = {}) const;
};

// Built-in scenario shipped as scenarios/default.yaml: a PetClinic-like
// application under stationary, seasonal and burst load for 600 s.
Scenario default_scenario();

// YAML scenario. Unknown keys, wrong types and out-of-range values raise
// ConfigError carrying the offending line.
Scenario parse_scenario(const std::string& text, const std::string& source_name = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

// Effective configuration as YAML; parse_scenario(dump_scenario(s)) == s.
std::string dump_scenario(const Scenario& scenario);

// "1..10", "3", "1,4,9" -> seeds. Both throw ParameterError on bad input.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
std::vector<StrategyKind> parse_strategy_list(const std::string& text);

}  // namespace reprtrace
