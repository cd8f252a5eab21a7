#include "hirschlab/suites.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace hirschlab;

namespace {

int run_command(const SuiteConfig& cfg) {
    Report report;
    try {
        report = run_suite(cfg);
    } catch (const Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    for (const auto& c : report.checks) {
        std::cout << "[" << to_string(c.status) << "] " << c.id << "  -  " << c.anchor;
        std::cout << "  (" << static_cast<long>(c.millis) << " ms)\n";
        if (c.status != CheckStatus::Pass && c.evidence.contains("error"))
            std::cout << "    " << c.evidence["error"].get<std::string>() << "\n";
    }
    const Json summary = report.to_json()["summary"];
    std::cout << "checks: " << summary["pass"] << " passed, " << summary["fail"] << " failed, "
              << summary["inconclusive"] << " inconclusive\n";
    if (!cfg.report_path.empty()) {
        try {
            save_json_file(cfg.report_path, report.to_json());
        } catch (const Error& e) {
            std::cerr << "io error: " << e.what() << "\n";
            return 2;
        }
    }
    return report.exit_code();
}

int roundtrip_command(const std::string& path) {
    try {
        const RoundtripResult res = roundtrip_file(path);
        std::cout << (res.ok ? "[pass] " : "[fail] ") << res.kind << ": " << res.message << "\n";
        return res.ok ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hirschlab - exact verification suites for filtered complexes, divided-power "
                 "Hirsch extensions, Koszul comparisons and component covers"};
    app.require_subcommand(1);

    SuiteConfig cfg;
    auto* run = app.add_subcommand("run", "run a verification suite");
    std::string suites_help;
    for (const auto& s : suite_names())
        suites_help += (suites_help.empty() ? "" : ", ") + s;
    run->add_option("--suite", cfg.suite, "suite id (" + suites_help + ")")->capture_default_str();
    run->add_option("--model", cfg.model_name, "canned model name");
    run->add_option("--model-file", cfg.model_file, "model JSON file (overrides --model)");
    run->add_option("--truncation", cfg.N, "truncation bound N")->capture_default_str();
    run->add_option("--window", cfg.window, "stabilization window w")->capture_default_str();
    run->add_option("--degree-bound", cfg.D, "polynomial degree bound override");
    run->add_option("--i-max", cfg.i_max, "largest filtration level checked")->capture_default_str();
    run->add_option("--q-max", cfg.q_max, "largest cohomological degree checked")->capture_default_str();
    run->add_option("--jobs", cfg.jobs, "worker threads (default: HIRSCHLAB_JOBS or 1)");
    run->add_option("--seed", cfg.seed, "seed for the randomized checks")->capture_default_str();
    run->add_option("--report", cfg.report_path, "write the JSON report here");
    std::string faults_help;
    for (const auto& s : fault_names())
        faults_help += (faults_help.empty() ? "" : ", ") + s;
    run->add_option("--inject-fault", cfg.inject_fault, "negative-test fault (" + faults_help + ")");

    std::string roundtrip_path;
    auto* rt = app.add_subcommand("roundtrip", "load, save and reload a JSON artifact; verify identity");
    rt->add_option("path", roundtrip_path, "artifact file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    if (run->parsed())
        return run_command(cfg);
    return roundtrip_command(roundtrip_path);
}
