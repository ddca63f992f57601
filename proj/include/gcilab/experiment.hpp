#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gcilab/gaussmc.hpp"

namespace gcilab {

// Command-line defaults; fields present in a spec win over these.
struct RunFlags {
    std::optional<std::uint64_t> seed;
    std::size_t budget = 100000;
    double tol = 0.0;  // 0: per-operation default
    unsigned threads = 1;
    Method method = Method::monte_carlo;
    std::optional<std::string> out;  // stem override
};

struct RunOutcome {
    int exit_code = 1;
    nlohmann::json report;
    std::vector<std::string> written;
};

namespace experiment {

inline constexpr const char* kKinds[] = {"center",        "measure",          "verify-gci", "equality",
                                         "translate-independent", "bl-constant", "flow", "counterexample"};

// Runs a parsed spec; never throws, errors land in the report with exit code 1.
// The report carries "series" when the kind produces plot data.
RunOutcome run_spec(const nlohmann::json& spec, const RunFlags& flags);

// Reads the spec file, runs it and writes <stem>.report.json (and CSV series).
RunOutcome run_experiment(const std::string& path, const RunFlags& flags);

// One CSV per series: the first goes to <stem>.csv, the rest to <stem>.<name>.csv.
// Throws NoSeries when the report has none.
std::vector<std::string> emit_plot_data(const nlohmann::json& report, const std::string& stem);

// Report without the wall-clock field, serialized; equal strings mean equal runs.
std::string report_body(const nlohmann::json& report);

}  // namespace experiment
}  // namespace gcilab
