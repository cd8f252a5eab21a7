#pragma once

#include "hirschlab/io.hpp"
#include "hirschlab/koszul.hpp"

#include <random>

namespace hirschlab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "hirschlab-report/1";

enum class CheckStatus { Pass, Fail, Inconclusive };

const char* to_string(CheckStatus s);

struct CheckRecord {
    std::string id;
    std::string anchor;  // the mathematical claim being verified
    CheckStatus status = CheckStatus::Fail;
    Json evidence = Json::object();
    double millis = 0.0;
};

struct SuiteConfig {
    std::string suite = "all";
    std::string model_name;  // restrict model-driven suites to one canned model
    std::string model_file;  // load the model from JSON instead
    int N = 6;
    int N0 = -1;
    int window = 2;
    int D = -1;  // override the model's degree bound
    int i_max = 4;
    int q_max = 3;
    int jobs = 0;  // 0: HIRSCHLAB_JOBS or 1
    unsigned long long seed = 0x48495253ULL;
    std::string inject_fault;
    std::string report_path;

    Json to_json() const;
};

struct Report {
    SuiteConfig config;
    std::vector<CheckRecord> checks;

    bool all_pass() const;
    bool any_fail() const;
    bool any_inconclusive() const;
    /// 0 all pass, 1 mathematical failure, 3 inconclusive present.
    int exit_code() const;
    Json to_json(bool with_times = true) const;
};

const std::vector<std::string>& suite_names();
const std::vector<std::string>& fault_names();

/// Runs one suite (or "all") over a worker pool of cfg.jobs threads.
/// Throws Error("UnknownSuite"/"UnknownModel"/"UnknownFault"/...) for config
/// problems; mathematical failures are recorded, not thrown.
Report run_suite(const SuiteConfig& cfg);

/* Deterministic generators shared by the suites and the test binaries. */

/// Random bounded complex: elementary pieces conjugated by a random basis change.
Complex random_complex(std::mt19937_64& rng, int max_len, int max_dim);

/// Random null-homotopic chain map A -> B.
ChainMap random_null_homotopic(std::mt19937_64& rng, const Complex& A, const Complex& B);

/// base (x) exterior algebra on r degree-1 generators, with the wedge operators.
HirschDatum exterior_tensor_datum(const Complex& base, int r);

/// g (x) id on the exterior factor (intertwines the wedge operators).
ChainMap exterior_tensor_map(const ChainMap& g, int r);

}  // namespace hirschlab
