#pragma once

#include "gkflow/flow_engine.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace gkflow::cli {

struct ScenarioFile {
    flow::Scenario scenario;
    std::vector<double> t_schedule;
};

/// JSON scenario document. Throws InputError naming the line and key of the first problem.
///
/// Keys: name, builtin, domain {lower, upper}, fields {metric, poisson}, potential {f},
/// tolerances {...}, grid (N or {counts, inset}), numerics {h, dt, panels}, t_schedule [t...].
[[nodiscard]] ScenarioFile parse_scenario_json(std::string_view text, std::string_view origin);

/// A built-in scenario name, or a path to a JSON scenario document.
[[nodiscard]] ScenarioFile load_scenario(const std::string& name_or_path);

}  // namespace gkflow::cli
