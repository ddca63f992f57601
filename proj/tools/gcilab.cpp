#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcilab/error.hpp"
#include "gcilab/experiment.hpp"

using namespace gcilab;

int main(int argc, char** argv) {
    CLI::App app{"gcilab: Gaussian correlation and Brascamp-Lieb experiment runner"};
    app.set_version_flag("--version", "gcilab 0.1.0");

    std::vector<std::string> positional;
    std::uint64_t seed = 0;
    std::size_t budget = 100000;
    double tol = 0.0;
    unsigned threads = 1;
    std::string method = "mc";
    std::string out;
    bool quiet = false;

    app.add_option("args", positional, "[kind] spec.json")->required()->expected(1, 2);
    auto* seed_opt = app.add_option("--seed", seed, "seed used when the spec has none");
    app.add_option("--budget", budget, "sample budget for mc/qmc");
    app.add_option("--tol", tol, "tolerance (0 = per-operation default)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--method", method, "mc | qmc | quadrature")->check(CLI::IsMember({"mc", "qmc", "quadrature"}));
    auto* out_opt = app.add_option("--out", out, "output stem");
    app.add_flag("-q,--quiet", quiet, "do not print the report path");

    CLI11_PARSE(app, argc, argv);

    std::string kind, path;
    if (positional.size() == 2) {
        kind = positional[0];
        path = positional[1];
        bool known = false;
        for (const char* k : experiment::kKinds) known = known || kind == k;
        if (!known) {
            std::cerr << "gcilab: unknown kind '" << kind << "'\n";
            return 1;
        }
    } else {
        path = positional[0];
    }

    RunFlags flags;
    if (*seed_opt) flags.seed = seed;
    flags.budget = budget;
    flags.tol = tol;
    flags.threads = threads;
    flags.method = method_from_string(method);
    if (*out_opt) flags.out = out;

    if (!kind.empty()) {
        std::ifstream is(path);
        const auto spec = nlohmann::json::parse(is, nullptr, false);
        if (spec.is_object() && spec.contains("kind") && spec["kind"].is_string() &&
            spec["kind"].get<std::string>() != kind) {
            std::cerr << "gcilab: subcommand '" << kind << "' does not match spec kind '"
                      << spec["kind"].get<std::string>() << "'\n";
            return 1;
        }
    }

    RunOutcome r = experiment::run_experiment(path, flags);
    if (r.report.value("status", std::string()) == "error") {
        const auto& e = r.report["error"];
        std::cerr << "gcilab: " << e.value("code", std::string("?")) << ": " << e.value("message", std::string()) << "\n";
    }
    if (!quiet)
        for (const auto& f : r.written) std::cout << f << "\n";
    return r.exit_code;
}
