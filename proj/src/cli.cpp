#include "omfloc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <sstream>
#include <thread>

#include "omfloc/objective.hpp"
#include "omfloc/oracle.hpp"

namespace omfloc::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

double to_double(const std::string& t, const std::string& what) {
    double v = 0.0;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw InvalidInput("cannot parse " + what + ": '" + t + "'");
    return v;
}

std::size_t to_size(const std::string& t, const std::string& what) {
    std::size_t v = 0;
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end) throw InvalidInput("cannot parse " + what + ": '" + t + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

Json number_or_null(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

void finish(RunResult& r, double tol) {
    const double obj = r.solution.objective;
    if (r.lower_bound) {
        // Ordered medians of distances are never negative.
        r.lower_bound = std::clamp(*r.lower_bound, 0.0, obj);
        r.gap_percent = gap_percent(obj, *r.lower_bound);
        if (r.bound_is_exact && obj - *r.lower_bound <= tol * std::abs(obj)) r.gap_percent = 0.0;
    }
    if (r.timed_out) r.status = "time_limit";
    else if (r.bound_is_exact && r.gap_percent && *r.gap_percent == 0.0) r.status = "optimal";
    else if (r.bound_is_exact) r.status = "bounded";
    else r.status = "heuristic";
}

void copy_report(const SolveReport& rep, RunResult& r) {
    r.nodes = rep.nodes;
    r.columns = rep.columns;
    r.exact_pricer_calls = rep.exact_pricer_calls;
    r.heuristic_pricer_calls = rep.heuristic_pricer_calls;
    r.total_pricer_calls = rep.total_pricer_calls;
    r.timed_out = rep.timed_out;
    r.theta = rep.theta;
}

}  // namespace

InstanceFile read_instance(std::istream& in) {
    InstanceFile file;
    std::size_t n = 0, d = 0;
    bool header = false;
    int line_no = 0;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto tok = tokens(t);
        if (!header) {
            if (tok.size() != 3) throw InvalidInput("instance header must be 'n d p'");
            n = to_size(tok[0], "n");
            d = to_size(tok[1], "d");
            file.p = to_size(tok[2], "p");
            if (n == 0 || d == 0 || file.p == 0) throw InvalidInput("instance header values must be positive");
            header = true;
            continue;
        }
        if (file.points.size() == n) throw InvalidInput("instance has more than n coordinate rows");
        if (tok.size() != d)
            throw InvalidInput("line " + std::to_string(line_no) + ": expected " + std::to_string(d) + " coordinates");
        Point q(d);
        for (std::size_t l = 0; l < d; ++l) q[l] = to_double(tok[l], "coordinate");
        file.points.push_back(std::move(q));
    }
    if (!header) throw InvalidInput("instance file is empty");
    if (file.points.size() != n) throw InvalidInput("instance has fewer than n coordinate rows");
    return file;
}

InstanceFile read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open instance file '" + path + "'");
    return read_instance(in);
}

void write_instance(std::ostream& out, const InstanceFile& file) {
    const std::size_t d = file.points.empty() ? 0 : file.points.front().size();
    out << file.points.size() << ' ' << d << ' ' << file.p << '\n';
    const auto old = out.precision(17);
    for (const auto& q : file.points) {
        for (std::size_t l = 0; l < q.size(); ++l) out << (l ? " " : "") << q[l];
        out << '\n';
    }
    out.precision(old);
}

LambdaVector parse_lambda(const std::string& spec, std::size_t n) {
    if (spec.empty()) throw InvalidInput("empty lambda specification");
    if (spec[0] == '@') {
        std::ifstream in(spec.substr(1));
        if (!in) throw InvalidInput("cannot open lambda file '" + spec.substr(1) + "'");
        std::vector<double> w;
        for (std::string t; in >> t;) w.push_back(to_double(t, "lambda weight"));
        if (w.size() != n) throw InvalidInput("lambda file must hold exactly n weights");
        return LambdaVector(std::move(w));
    }
    const auto parts = split(spec, ':');
    const std::string head = parts[0];
    const std::size_t half = std::max<std::size_t>(1, n / 2);
    auto arg_k = [&](std::size_t i) { return parts.size() > i ? to_size(parts[i], "k") : half; };
    auto arg_alpha = [&](std::size_t i) { return parts.size() > i ? to_double(parts[i], "alpha") : 0.9; };
    auto expect = [&](std::size_t most) {
        if (parts.size() > most) throw InvalidInput("too many fields in lambda specification '" + spec + "'");
    };
    if (head == "W") return expect(1), make_lambda(LambdaKind::W, n);
    if (head == "C") return expect(1), make_lambda(LambdaKind::C, n);
    if (head == "A") return expect(1), make_lambda(LambdaKind::A, n);
    if (head == "K") return expect(2), make_lambda(LambdaKind::K, n, arg_k(1));
    if (head == "D") return expect(2), make_lambda(LambdaKind::D, n, 0, arg_alpha(1));
    if (head == "S") return expect(3), make_lambda(LambdaKind::S, n, arg_k(1), arg_alpha(2));
    throw InvalidInput("unknown lambda specification '" + spec + "'");
}

NormSpec parse_norm(const std::string& spec) {
    const std::string s = lower(spec);
    if (s == "l1") return NormSpec::l1();
    if (s == "l2") return NormSpec::l2();
    if (s.rfind("ltau:", 0) == 0) {
        const auto rs = split(s.substr(5), '/');
        if (rs.size() != 2) throw InvalidInput("ltau norm needs the form ltau:r/s");
        return NormSpec::ltau(static_cast<int>(to_size(rs[0], "r")), static_cast<int>(to_size(rs[1], "s")));
    }
    throw InvalidInput("unknown norm '" + spec + "'");
}

MethodSpec parse_method(const std::string& spec) {
    MethodSpec m;
    m.text = spec;
    const auto parts = split(lower(spec), ':');
    const std::string& head = parts[0];
    auto single = [&]() {
        if (parts.size() != 1) throw InvalidInput("method '" + head + "' takes no argument");
    };
    auto argument = [&]() {
        if (parts.size() != 2) throw InvalidInput("method '" + head + "' needs one argument");
        return to_size(parts[1], head + " argument");
    };
    if (head == "bnp") single(), m.kind = MethodSpec::Kind::Bnp;
    else if (head == "matheur") single(), m.kind = MethodSpec::Kind::Matheur;
    else if (head == "partition-oracle") single(), m.kind = MethodSpec::Kind::PartitionOracle;
    else if (head == "kmean") m.kind = MethodSpec::Kind::KMean, m.m = argument();
    else if (head == "ptf") m.kind = MethodSpec::Kind::Ptf, m.m = argument();
    else if (head == "grid-oracle") m.kind = MethodSpec::Kind::GridOracle, m.resolution = static_cast<int>(argument());
    else throw InvalidInput("unknown method '" + spec + "'");
    return m;
}

RunResult execute(const InstanceFile& file, const RunOptions& options) {
    const MethodSpec method = parse_method(options.method);
    const NormSpec norm = parse_norm(options.norm);
    const std::size_t p = options.p.value_or(file.p);
    Instance inst(file.points, p, norm, parse_lambda(options.lambda, file.points.size()));
    if (options.inner != "bnp" && options.inner != "matheur") throw InvalidInput("inner solver must be bnp or matheur");
    if (options.target != "reduced" && options.target != "expanded")
        throw InvalidInput("aggregation target must be reduced or expanded");
    if (options.rounds < 1) throw InvalidInput("rounds must be at least 1");
    if (!(options.tol > 0.0)) throw InvalidInput("tolerance must be positive");
    if (!(options.time_limit >= 0.0)) throw InvalidInput("time limit must be nonnegative");

    SolveConfig cfg;
    cfg.theta = options.theta;
    cfg.time_limit = options.time_limit;
    cfg.seed = options.seed;
    cfg.heuristic_first = options.heuristic_first;
    cfg.rounds = options.rounds;
    cfg.tolerance = options.tol;
    resolve_theta(inst.lambda(), cfg.theta);

    RunResult r;
    const auto start = std::chrono::steady_clock::now();
    switch (method.kind) {
        case MethodSpec::Kind::Bnp:
        case MethodSpec::Kind::Matheur: {
            const SolveReport rep = method.kind == MethodSpec::Kind::Bnp ? solve(inst, cfg) : matheur_solve(inst, cfg);
            copy_report(rep, r);
            r.solution = rep.incumbent;
            r.bound_is_exact = rep.bound_is_exact;
            // Heuristic pricing leaves the master value without a bound meaning.
            if (rep.bound_is_exact) {
                r.lower_bound = rep.lower_bound;
                r.gap_root_percent = rep.root_gap_percent;
            }
            break;
        }
        case MethodSpec::Kind::KMean:
        case MethodSpec::Kind::Ptf: {
            const auto how = method.kind == MethodSpec::Kind::KMean ? AggregationMethod::KMean : AggregationMethod::Ptf;
            const auto target = options.target == "expanded" ? AggregationTarget::Expanded : AggregationTarget::Reduced;
            const AggregatedReport agg = aggregated_solve(inst, how, method.m, cfg, options.inner == "matheur", target);
            copy_report(agg.inner, r);
            r.solution = agg.solution;
            AggregationInfo info;
            info.method = method.kind == MethodSpec::Kind::KMean ? "kmean" : "ptf";
            info.m = method.m;
            info.delta = agg.delta;
            info.two_delta_bound = agg.two_delta_bound;
            info.aggregated_objective = agg.aggregated_objective;
            info.bound_guaranteed = agg.bound_guaranteed;
            r.aggregation = info;
            // On the expanded multiset every objective moves by at most delta * sum(lambda).
            if (agg.bound_guaranteed && agg.inner.bound_is_exact) {
                r.lower_bound = agg.inner.lower_bound - agg.delta * inst.lambda().sum();
                r.bound_is_exact = true;
            }
            break;
        }
        case MethodSpec::Kind::GridOracle: {
            r.solution = grid_oracle(inst, method.resolution);
            const Box box = bounding_box(inst);
            Point half(inst.d());
            for (std::size_t l = 0; l < inst.d(); ++l) half[l] = 0.5 * (box.upper[l] - box.lower[l]) / method.resolution;
            const double slack = inst.lambda().sum() * norm_distance(half, Point(inst.d(), 0.0), inst.norm());
            r.lower_bound = r.solution.objective - slack;
            r.bound_is_exact = true;
            break;
        }
        case MethodSpec::Kind::PartitionOracle: {
            const OracleResult o = partition_oracle_bounded(inst);
            r.solution = o.solution;
            r.lower_bound = o.lower_bound;
            r.bound_is_exact = true;
            break;
        }
    }
    r.time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    finish(r, options.tol);
    return r;
}

std::string report_json(const RunResult& r, const RunOptions& o, const std::string& instance_path) {
    Json j;
    j["status"] = r.status;
    j["method"] = o.method;
    j["objective"] = r.solution.objective;
    j["lower_bound"] = number_or_null(r.lower_bound);
    j["gap_percent"] = number_or_null(r.gap_percent);
    j["gap_root_percent"] = number_or_null(r.gap_root_percent);
    j["nodes"] = r.nodes;
    j["columns"] = r.columns;
    j["exact_pricer_calls"] = r.exact_pricer_calls;
    j["heuristic_pricer_calls"] = r.heuristic_pricer_calls;
    j["total_pricer_calls"] = r.total_pricer_calls;
    j["time_seconds"] = r.time_seconds;
    j["bound_is_exact"] = r.bound_is_exact;
    j["timed_out"] = r.timed_out;
    Json fac = Json::array();
    for (const auto& x : r.solution.facilities) fac.push_back(x);
    j["facilities"] = fac;
    j["assignment"] = r.solution.assignment;
    Json c;
    c["instance"] = instance_path;
    c["lambda"] = o.lambda;
    c["norm"] = o.norm;
    c["p"] = o.p ? Json(*o.p) : Json(nullptr);
    c["theta"] = number_or_null(r.theta);
    c["time_limit"] = o.time_limit;
    c["seed"] = o.seed;
    c["rounds"] = o.rounds;
    c["tol"] = o.tol;
    c["heuristic_first"] = o.heuristic_first;
    c["inner"] = o.inner;
    c["target"] = o.target;
    j["config"] = c;
    if (r.aggregation) {
        Json a;
        a["method"] = r.aggregation->method;
        a["m"] = r.aggregation->m;
        a["delta"] = r.aggregation->delta;
        a["two_delta_bound"] = r.aggregation->two_delta_bound;
        a["aggregated_objective"] = r.aggregation->aggregated_objective;
        a["bound_guaranteed"] = r.aggregation->bound_guaranteed;
        j["aggregation"] = a;
    }
    return j.dump(2);
}

namespace {

struct BenchRow {
    std::string instance;
    std::string n;
    std::string p;
    std::string lambda;
    std::string norm;
    std::string method;
    std::string status;
    std::optional<double> values[9];  // objective .. time_seconds
    long runs = 1;
    std::string error;
};

constexpr const char* kBenchHeader =
    "instance,n,p,lambda,norm,method,status,objective,lower_bound,gap_percent,gap_root_percent,nodes,columns,"
    "exact_pricer_calls,total_pricer_calls,time_seconds,runs,error";

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(const std::optional<double>& v) {
    if (!v) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", *v);
    return buf;
}

void write_row(std::ostream& out, const BenchRow& r) {
    out << csv_field(r.instance) << ',' << r.n << ',' << r.p << ',' << csv_field(r.lambda) << ',' << r.norm << ','
        << csv_field(r.method) << ',' << r.status;
    for (const auto& v : r.values) out << ',' << csv_number(v);
    out << ',' << r.runs << ',' << csv_field(r.error) << '\n';
}

template <class T>
std::vector<T> list_of(const Json& manifest, const char* key, std::vector<T> fallback) {
    if (!manifest.contains(key)) return fallback;
    const Json& v = manifest.at(key);
    if (!v.is_array()) return {v.get<T>()};
    return v.get<std::vector<T>>();
}

}  // namespace

void bench(const std::string& manifest_path, int jobs, std::ostream& out) {
    std::ifstream in(manifest_path);
    if (!in) throw InvalidInput("cannot open manifest '" + manifest_path + "'");
    Json manifest;
    try {
        manifest = Json::parse(in);
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!manifest.is_object()) throw InvalidInput("manifest must be a JSON object");

    struct Task {
        std::string instance;
        std::string resolved;
        RunOptions options;
    };
    std::vector<Task> tasks;
    try {
        const auto base = std::filesystem::path(manifest_path).parent_path();
        const auto instances = list_of<std::string>(manifest, "instances", {});
        const auto methods = list_of<std::string>(manifest, "methods", {"bnp"});
        const auto lambdas = list_of<std::string>(manifest, "lambdas", {"W"});
        const auto ps = list_of<std::size_t>(manifest, "p", {0});
        RunOptions common;
        common.norm = manifest.value("norm", common.norm);
        common.time_limit = manifest.value("time_limit", common.time_limit);
        common.seed = manifest.value("seed", common.seed);
        common.rounds = manifest.value("rounds", common.rounds);
        common.tol = manifest.value("tol", common.tol);
        common.inner = manifest.value("inner", common.inner);
        common.target = manifest.value("target", common.target);
        common.heuristic_first = manifest.value("heuristic_first", common.heuristic_first);
        for (const auto& inst : instances)
            for (const auto& lam : lambdas)
                for (std::size_t p : ps)
                    for (const auto& m : methods) {
                        Task t{inst, inst, common};
                        const std::filesystem::path path(inst);
                        if (path.is_relative()) t.resolved = (base / path).string();
                        t.options.lambda = lam;
                        t.options.method = m;
                        if (p > 0) t.options.p = p;
                        tasks.push_back(std::move(t));
                    }
    } catch (const Json::exception& e) {
        throw InvalidInput(std::string("malformed manifest: ") + e.what());
    }

    std::vector<BenchRow> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k; (k = next++) < tasks.size();) {
            const Task& t = tasks[k];
            BenchRow& row = rows[k];
            row.instance = t.instance;
            row.lambda = t.options.lambda;
            row.norm = t.options.norm;
            row.method = t.options.method;
            row.p = t.options.p ? std::to_string(*t.options.p) : "";
            try {
                const InstanceFile file = read_instance_file(t.resolved);
                row.n = std::to_string(file.points.size());
                row.p = std::to_string(t.options.p.value_or(file.p));
                const RunResult r = execute(file, t.options);
                row.status = r.status;
                row.values[0] = r.solution.objective;
                row.values[1] = r.lower_bound;
                row.values[2] = r.gap_percent;
                row.values[3] = r.gap_root_percent;
                row.values[4] = static_cast<double>(r.nodes);
                row.values[5] = static_cast<double>(r.columns);
                row.values[6] = static_cast<double>(r.exact_pricer_calls);
                row.values[7] = static_cast<double>(r.total_pricer_calls);
                row.values[8] = r.time_seconds;
            } catch (const std::exception& e) {
                row.status = "error";
                row.error = e.what();
            }
        }
    };
    const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::size_t>(tasks.size(), 1))));
    std::vector<std::thread> pool;
    for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    out << kBenchHeader << '\n';
    for (const auto& r : rows) write_row(out, r);

    // Averages per (method, lambda, p, norm) over the runs that finished.
    std::vector<std::string> order;
    std::map<std::string, std::vector<const BenchRow*>> groups;
    for (const auto& r : rows) {
        if (r.status == "error") continue;
        const std::string key = r.method + '\x1f' + r.lambda + '\x1f' + r.p + '\x1f' + r.norm;
        if (!groups.count(key)) order.push_back(key);
        groups[key].push_back(&r);
    }
    for (const auto& key : order) {
        const auto& members = groups[key];
        BenchRow avg;
        avg.instance = "average";
        avg.p = members.front()->p;
        avg.lambda = members.front()->lambda;
        avg.norm = members.front()->norm;
        avg.method = members.front()->method;
        avg.status = "average";
        avg.runs = static_cast<long>(members.size());
        for (int c = 0; c < 9; ++c) {
            double sum = 0.0;
            int count = 0;
            for (const BenchRow* m : members)
                if (m->values[c]) sum += *m->values[c], ++count;
            if (count > 0) avg.values[c] = sum / count;
        }
        write_row(out, avg);
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Continuous multifacility ordered median location solver"};
    app.require_subcommand(1);

    RunOptions opt;
    std::string instance_path;
    std::string theta = "auto";
    bool exact_only = false;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one instance and print a JSON report");
    solve_cmd->add_option("instance", instance_path, "Instance file")->required();
    solve_cmd->add_option("--lambda", opt.lambda, "W|C|K:<k>|D:<alpha>|S:<k>:<alpha>|A|@file");
    solve_cmd->add_option("--norm", opt.norm, "l1|l2|ltau:<r>/<s>");
    solve_cmd->add_option("--method", opt.method,
                          "bnp|matheur|kmean:<m>|ptf:<m>|grid-oracle:<res>|partition-oracle");
    solve_cmd->add_option("--theta", theta, "Branching weight in [0,1] or auto");
    solve_cmd->add_option("--time-limit", opt.time_limit, "Seconds");
    solve_cmd->add_option("--seed", opt.seed, "Random seed");
    solve_cmd->add_option("--rounds", opt.rounds, "Initial pool rounds");
    solve_cmd->add_option("--tol", opt.tol, "Optimality tolerance");
    solve_cmd->add_option("--p", opt.p, "Override the facility count of the file");
    solve_cmd->add_flag("--exact-only", exact_only, "Skip the heuristic pricers before exact pricing");
    solve_cmd->add_option("--inner", opt.inner, "Solver for aggregated instances: bnp|matheur");
    solve_cmd->add_option("--target", opt.target, "Aggregated instance: reduced|expanded");

    std::string manifest;
    int jobs = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Run a manifest and print CSV");
    bench_cmd->add_option("manifest", manifest, "Manifest JSON file")->required();
    bench_cmd->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }

    try {
        if (bench_cmd->parsed()) {
            bench(manifest, jobs, out);
            return 0;
        }
        if (lower(theta) != "auto") {
            opt.theta = to_double(theta, "theta");
        }
        opt.heuristic_first = !exact_only;
        const InstanceFile file = read_instance_file(instance_path);
        const RunResult r = execute(file, opt);
        out << report_json(r, opt, instance_path) << '\n';
        return r.timed_out ? 2 : 0;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace omfloc::cli
