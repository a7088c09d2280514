#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omfloc/bnp.hpp"
#include "omfloc/matheur.hpp"
#include "omfloc/model.hpp"

namespace omfloc::cli {

/// Contents of an instance file: "n d p" followed by n rows of d coordinates.
struct InstanceFile {
    std::vector<Point> points;
    std::size_t p = 1;
};

InstanceFile read_instance(std::istream& in);
InstanceFile read_instance_file(const std::string& path);
/// Coordinates are written with 17 significant digits so reading them back is exact.
void write_instance(std::ostream& out, const InstanceFile& file);

/// W | C | K[:k] | D[:alpha] | S[:k[:alpha]] | A | @file, with k = n/2 and alpha = 0.9 by default.
LambdaVector parse_lambda(const std::string& spec, std::size_t n);
/// l1 | l2 | ltau:r/s
NormSpec parse_norm(const std::string& spec);

struct MethodSpec {
    enum class Kind { Bnp, Matheur, KMean, Ptf, GridOracle, PartitionOracle };
    Kind kind = Kind::Bnp;
    std::size_t m = 0;    // aggregation size
    int resolution = 0;   // grid oracle
    std::string text;
};

/// bnp | matheur | kmean:<m> | ptf:<m> | grid-oracle:<res> | partition-oracle
MethodSpec parse_method(const std::string& spec);

struct RunOptions {
    std::string lambda = "W";
    std::string norm = "l1";
    std::string method = "bnp";
    std::optional<double> theta;
    double time_limit = 7200.0;
    std::uint64_t seed = 0;
    int rounds = 20;
    double tol = 1e-6;
    std::optional<std::size_t> p;
    bool heuristic_first = true;
    std::string inner = "bnp";        // solver used on aggregated instances
    std::string target = "reduced";   // aggregated instance: reduced | expanded
};

struct AggregationInfo {
    std::string method;
    std::size_t m = 0;
    double delta = 0.0;
    double two_delta_bound = 0.0;
    double aggregated_objective = 0.0;
    bool bound_guaranteed = false;
};

struct RunResult {
    std::string status;
    Solution solution;
    std::optional<double> lower_bound;
    std::optional<double> gap_percent;
    std::optional<double> gap_root_percent;
    long nodes = 0;
    long columns = 0;
    long exact_pricer_calls = 0;
    long heuristic_pricer_calls = 0;
    long total_pricer_calls = 0;
    double time_seconds = 0.0;
    bool bound_is_exact = false;
    bool timed_out = false;
    std::optional<double> theta;
    std::optional<AggregationInfo> aggregation;
};

/// Builds the instance from the file and the options, then runs the chosen method.
RunResult execute(const InstanceFile& file, const RunOptions& options);

/// The JSON report for one run, keys in a fixed order.
std::string report_json(const RunResult& result, const RunOptions& options, const std::string& instance_path);

/// One CSV row per manifest entry followed by per-group averages.
void bench(const std::string& manifest_path, int jobs, std::ostream& out);

/// Entry point shared by the binary and the tests. Exit codes: 0 done,
/// 2 stopped by the time limit, 3 invalid input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace omfloc::cli
