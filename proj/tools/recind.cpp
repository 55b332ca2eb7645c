// recind command-line tool: indicator computation, exact and quadrature
// oracles, reproducible Monte Carlo experiments, decomposition reports, and
// the streaming-detector benchmark.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recind/core.hpp"
#include "recind/event_algebra.hpp"
#include "recind/exact_oracle.hpp"
#include "recind/io.hpp"
#include "recind/quadrature.hpp"
#include "recind/rng.hpp"
#include "recind/simulator.hpp"
#include "recind/stats.hpp"
#include "recind/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace recind;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCap = 3;

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << content;
    } else {
        write_file(out_path, content);
    }
}

json tool_header(const std::string& command) {
    return json{{"tool", kToolName}, {"version", kVersion}, {"command", command}};
}

// ---------------------------------------------------------------------------
// indicators
// ---------------------------------------------------------------------------

struct IndicatorsArgs {
    std::string input;
    std::string mode = "both";
    std::string out;
};

void run_indicators(const IndicatorsArgs& args) {
    std::ifstream in(args.input);
    if (!in) throw InputError("cannot open '" + args.input + "'");
    const Path path = parse_path_file(in);
    const bool want_chain = args.mode != "dominance";
    const bool want_dom = args.mode != "chain";
    const IndicatorVector chain =
        want_chain ? indicators(path, SemanticsMode::Chain) : IndicatorVector{};
    const IndicatorVector dom =
        want_dom ? indicators(path, SemanticsMode::Dominance) : IndicatorVector{};

    std::ostringstream csv;
    csv << "index";
    for (int i = 1; i <= path.dim(); ++i) csv << ",x" << i;
    if (want_chain) csv << ",zeta_chain";
    if (want_dom) csv << ",zeta_dominance";
    csv << "\n";
    for (int j = 1; j <= path.length(); ++j) {
        csv << j;
        for (const double c : path.at(j).coords()) csv << "," << format_double(c);
        if (want_chain) csv << "," << chain.bit(j);
        if (want_dom) csv << "," << dom.bit(j);
        csv << "\n";
    }
    emit(csv.str(), args.out);
}

// ---------------------------------------------------------------------------
// exact
// ---------------------------------------------------------------------------

struct ExactArgs {
    int n = 3;
    int d = 1;
    std::string mode = "both";
    std::uint64_t cap = kDefaultEnumerationCap;
    std::string out;
};

json exact_mode_report(int n, int d, SemanticsMode mode, std::uint64_t cap) {
    const JointPmf<Rational> pmf = joint_pmf_iid(n, d, mode, cap);
    const JointPmf<Rational> product = product_of_marginals(pmf);
    const Rational tv = tv_distance(pmf, product);

    json probs = json::array();
    for (const Rational& q : pmf.probs) probs.push_back(to_fraction_string(q));
    json margs = json::array();
    for (const Rational& q : marginals(pmf)) margs.push_back(to_fraction_string(q));
    json covs = json::array();
    for (const auto& entry : pairwise_covariances(pmf)) {
        covs.push_back(json{{"j", entry.j}, {"jp", entry.jp}, {"cov", to_fraction_string(entry.covariance)}});
    }
    return json{{"source", to_string(pmf.source)},
                {"probs", probs},
                {"marginals", margs},
                {"tv_to_marginal_product", to_fraction_string(tv)},
                {"tv_to_marginal_product_approx", to_double(tv)},
                {"covariances", covs},
                {"max_abs_correlation", max_abs_correlation(pmf)}};
}

void run_exact(const ExactArgs& args) {
    json doc = tool_header("exact");
    doc["n"] = args.n;
    doc["d"] = args.d;
    doc["cap"] = args.cap;
    json modes;
    if (args.mode != "dominance") {
        modes["chain"] = exact_mode_report(args.n, args.d, SemanticsMode::Chain, args.cap);
    }
    if (args.mode != "chain") {
        modes["dominance"] = exact_mode_report(args.n, args.d, SemanticsMode::Dominance, args.cap);
    }
    doc["modes"] = modes;
    emit(doc.dump(2) + "\n", args.out);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> replicates;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> cap_states;
};

json config_echo(const ParsedConfig& parsed) {
    json spec_obj = json::object();
    for (const auto& [key, value] : parsed.spec_entries) spec_obj[key] = value;
    return json{{"n", parsed.cfg.n},           {"d", parsed.cfg.d},
                {"mode", parsed.mode_string},  {"replicates", parsed.cfg.replicates},
                {"seed", parsed.cfg.seed},     {"cap_states", parsed.cfg.cap_states},
                {"spec", spec_obj}};
}

json tv_report_json(const TvReport& report, const std::string& kind) {
    return json{{"kind", kind}, {"tv", report.tv}, {"max_abs_z", report.max_abs_z}};
}

json g_test_json(const GTestResult& g) {
    json out{{"applicable", g.applicable}, {"dof", g.dof}};
    if (g.applicable) {
        out["g"] = g.gstat;
        out["pvalue"] = g.pvalue;
    }
    return out;
}

void run_simulate(const SimulateArgs& args) {
    std::ifstream in(args.config);
    if (!in) throw InputError("cannot open '" + args.config + "'");
    ParsedConfig parsed = parse_config_file(in);
    if (args.seed) parsed.cfg.seed = *args.seed;
    if (args.replicates) parsed.cfg.replicates = *args.replicates;
    if (args.cap_states) parsed.cfg.cap_states = *args.cap_states;
    if (args.mode) {
        parsed.mode_string = *args.mode;
        parsed.cfg.run_chain = *args.mode != "dominance";
        parsed.cfg.run_dominance = *args.mode != "chain";
    }
    parsed.cfg.validate();

    const ExperimentResult result = run_experiment(parsed.cfg);

    // Reference joint law, when one of the oracles applies: enumeration for
    // iid specs within the cap, 1-D quadrature otherwise.
    const bool table_possible = parsed.cfg.n - 1 < 63 && outcome_count(parsed.cfg.n) <= parsed.cfg.cap_states;
    const bool enum_ok = parsed.cfg.spec.is_iid() && enumeration_feasible(parsed.cfg.n, parsed.cfg.d);
    std::optional<JointPmf<double>> quad_ref;
    if (table_possible && !enum_ok && parsed.cfg.d == 1 && parsed.cfg.n <= 6) {
        try {
            quad_ref = joint_pmf_quadrature_1d(parsed.cfg.spec).pmf;
        } catch (const CapError&) {
            // best-effort reference only; the run stands on its own
        }
    }

    std::ostringstream counts_csv;
    counts_csv << "mask,pattern";
    for (const auto& mode_result : result.modes) counts_csv << ",count_" << to_string(mode_result.mode);
    counts_csv << "\n";
    if (!result.modes.empty() && result.modes.front().joint) {
        const std::uint64_t outcomes = result.modes.front().joint->counts.size();
        for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
            counts_csv << mask << ",";
            const RecordPattern pattern = pattern_from_mask(parsed.cfg.n, mask);
            for (std::size_t i = 0; i < pattern.indices().size(); ++i) {
                if (i > 0) counts_csv << ";";
                counts_csv << pattern.indices()[i];
            }
            for (const auto& mode_result : result.modes) {
                counts_csv << "," << mode_result.joint->counts[mask];
            }
            counts_csv << "\n";
        }
    }

    json modes_json;
    for (const auto& mode_result : result.modes) {
        json m;
        m["l_summary"] = json{{"mean", mode_result.l_summary.mean},
                              {"variance", mode_result.l_summary.variance},
                              {"min", mode_result.l_summary.min_records},
                              {"max", mode_result.l_summary.max_records}};
        json marg_counts = json::array();
        json marg_phat = json::array();
        json marg_se = json::array();
        for (const std::uint64_t c : mode_result.marginal_counts) {
            const double phat = static_cast<double>(c) / static_cast<double>(result.replicates);
            marg_counts.push_back(c);
            marg_phat.push_back(phat);
            marg_se.push_back(std::sqrt(phat * (1.0 - phat) / static_cast<double>(result.replicates)));
        }
        m["marginals"] = json{{"counts", marg_counts}, {"phat", marg_phat}, {"std_error", marg_se}};
        m["joint_table"] = mode_result.joint.has_value();
        if (mode_result.joint) {
            const auto& joint = *mode_result.joint;
            m["independence"] =
                json{{"tv_to_own_marginal_product",
                      tv_distance(joint.pmf, product_of_marginals(joint.pmf, 1e-6))},
                     {"g_test", g_test_json(g_test(joint))},
                     {"max_abs_correlation", max_abs_correlation(joint.pmf, 1e-6)}};
            if (enum_ok) {
                const auto oracle = joint_pmf_iid(parsed.cfg.n, parsed.cfg.d, mode_result.mode);
                m["reference"] = tv_report_json(empirical_tv_report(joint, oracle), "enumeration");
            } else if (quad_ref) {
                // d = 1: chain and dominance records coincide, one table serves both.
                m["reference"] = tv_report_json(empirical_tv_report(joint, *quad_ref), "quadrature");
            } else {
                m["reference"] = json{{"kind", "none"}};
            }
        }
        modes_json[to_string(mode_result.mode)] = m;
    }

    json report = tool_header("simulate");
    report["config"] = config_echo(parsed);
    report["replicates"] = result.replicates;
    report["modes"] = modes_json;

    fs::create_directories(args.out_dir);
    const std::string counts_content = counts_csv.str();
    const std::string report_content = report.dump(2) + "\n";
    write_file((fs::path(args.out_dir) / "counts.csv").string(), counts_content);
    write_file((fs::path(args.out_dir) / "report.json").string(), report_content);

    json manifest = tool_header("simulate");
    manifest["seed"] = parsed.cfg.seed;
    manifest["config"] = config_echo(parsed);
    const char* stamp = std::getenv("RECIND_TIMESTAMP");
    manifest["timestamp"] = stamp ? stamp : "";
    manifest["outputs"] = json::array({json{{"file", "counts.csv"}, {"sha256", sha256_hex(counts_content)}},
                                       json{{"file", "report.json"}, {"sha256", sha256_hex(report_content)}}});
    write_file((fs::path(args.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

struct DecomposeArgs {
    int n = 0;
    std::string htable;
    std::string pmf;
    std::string out;
};

void run_decompose(const DecomposeArgs& args) {
    std::ifstream hin(args.htable);
    if (!hin) throw InputError("cannot open '" + args.htable + "'");
    const ParsedHTable h = parse_htable_file(hin);
    std::ifstream pin(args.pmf);
    if (!pin) throw InputError("cannot open '" + args.pmf + "'");
    const ParsedPmf pmf = parse_pmf_json(pin);

    if (args.n != 0 && (args.n != h.n || args.n != pmf.n)) {
        throw InputError("dimension mismatch: -n " + std::to_string(args.n) + ", h-table n = " +
                         std::to_string(h.n) + ", pmf n = " + std::to_string(pmf.n));
    }
    if (h.n != pmf.n) {
        throw InputError("dimension mismatch: h-table n = " + std::to_string(h.n) + ", pmf n = " +
                         std::to_string(pmf.n));
    }

    json doc = tool_header("decompose");
    doc["n"] = h.n;
    const bool exact = h.exact && pmf.exact;
    doc["arithmetic"] = exact ? "rational" : "float";
    if (exact) {
        const Rational direct = expectation_direct(h.rational, pmf.rational);
        const Rational decomp = expectation_via_decomposition(h.rational, pmf.rational);
        const Rational product = product_of_marginal_expectations(h.rational, pmf.rational);
        const Rational d1 = direct - decomp;
        const Rational d2 = direct - product;
        doc["expectation_direct"] = to_fraction_string(direct);
        doc["expectation_via_decomposition"] = to_fraction_string(decomp);
        doc["product_of_marginal_expectations"] = to_fraction_string(product);
        doc["abs_diff_direct_vs_decomposition"] = to_fraction_string(d1 < 0 ? -d1 : d1);
        doc["abs_diff_direct_vs_marginal_product"] = to_fraction_string(d2 < 0 ? -d2 : d2);
        doc["expectation_direct_approx"] = to_double(direct);
    } else {
        const double tol = 1e-6;
        const double direct = expectation_direct(h.dbl, pmf.dbl, tol);
        const double decomp = expectation_via_decomposition(h.dbl, pmf.dbl, tol);
        const double product = product_of_marginal_expectations(h.dbl, pmf.dbl, tol);
        doc["expectation_direct"] = direct;
        doc["expectation_via_decomposition"] = decomp;
        doc["product_of_marginal_expectations"] = product;
        doc["abs_diff_direct_vs_decomposition"] = std::abs(direct - decomp);
        doc["abs_diff_direct_vs_marginal_product"] = std::abs(direct - product);
    }
    emit(doc.dump(2) + "\n", args.out);
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::uint64_t observations = 10'000'000;
    int d = 1;
    std::string mode = "chain";
    std::uint64_t seed = 0;
    std::string out;
    std::string trace;
};

void run_bench(const BenchArgs& args) {
    if (args.observations < 1) throw InputError("bench needs at least one observation");
    if (args.d < 1) throw InputError("bench needs d >= 1");
    const SemanticsMode mode =
        args.mode == "dominance" ? SemanticsMode::Dominance : SemanticsMode::Chain;

    RecordDetector detector(mode);
    RngStream stream(args.seed, 0);
    std::vector<double> coords(static_cast<std::size_t>(args.d));

    const std::uint64_t trace_every = std::max<std::uint64_t>(1, args.observations / 256);
    std::ostringstream trace_csv;
    trace_csv << "observation,front_size\n";

    double front_size_sum = 0.0;
    std::size_t front_size_max = 0;

    const auto start = std::chrono::steady_clock::now();
    for (std::uint64_t t = 0; t < args.observations; ++t) {
        for (int i = 0; i < args.d; ++i) coords[static_cast<std::size_t>(i)] = stream.next_uniform();
        detector.step(coords);
        const std::size_t fs = detector.front_size();
        front_size_sum += static_cast<double>(fs);
        front_size_max = std::max(front_size_max, fs);
        if ((t + 1) % trace_every == 0 || t + 1 == args.observations) {
            trace_csv << (t + 1) << "," << fs << "\n";
        }
    }
    const auto stop = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(stop - start).count();

    json doc = tool_header("bench");
    doc["observations"] = args.observations;
    doc["d"] = args.d;
    doc["mode"] = to_string(mode);
    doc["seed"] = args.seed;
    doc["seconds"] = seconds;
    doc["observations_per_second"] = static_cast<double>(args.observations) / seconds;
    doc["records"] = detector.count();
    doc["front"] = json{{"mean_size", front_size_sum / static_cast<double>(args.observations)},
                        {"max_size", front_size_max}};
    emit(doc.dump(2) + "\n", args.out);
    if (!args.trace.empty()) write_file(args.trace, trace_csv.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"record indicator processes: exact enumeration, quadrature, and Monte Carlo"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);
    const auto mode_check = CLI::IsMember({"chain", "dominance", "both"});

    IndicatorsArgs ind;
    auto* cmd_ind = app.add_subcommand("indicators", "indicator bits for a path file");
    cmd_ind->add_option("input", ind.input, "path file: one observation per line")->required();
    cmd_ind->add_option("--mode", ind.mode, "chain, dominance, or both")->check(mode_check);
    cmd_ind->add_option("--out", ind.out, "output CSV (default stdout)");

    ExactArgs exact;
    auto* cmd_exact = app.add_subcommand("exact", "exact iid joint law by rank enumeration");
    cmd_exact->add_option("-n,--n", exact.n, "path length")->required();
    cmd_exact->add_option("-d,--d", exact.d, "dimension");
    cmd_exact->add_option("--mode", exact.mode, "chain, dominance, or both")->check(mode_check);
    cmd_exact->add_option("--cap", exact.cap, "enumeration cap on (n!)^d");
    cmd_exact->add_option("--out", exact.out, "output JSON (default stdout)");

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand("simulate", "Monte Carlo experiment from a config file");
    cmd_sim->add_option("config", sim.config, "key=value experiment config")->required();
    cmd_sim->add_option("--out-dir", sim.out_dir, "directory for counts.csv, report.json, manifest.json")
        ->required();
    cmd_sim->add_option("--seed", sim.seed, "override config seed");
    cmd_sim->add_option("--replicates", sim.replicates, "override config replicates");
    cmd_sim->add_option("--mode", sim.mode, "override config mode")->check(mode_check);
    cmd_sim->add_option("--cap-states", sim.cap_states, "max joint-table size");

    DecomposeArgs dec;
    auto* cmd_dec = app.add_subcommand("decompose", "expectation identity report for an h-table and pmf");
    cmd_dec->add_option("-n,--n", dec.n, "expected path length (checked against the files)");
    cmd_dec->add_option("--h-table", dec.htable, "CSV lines j,h0,h1")->required();
    cmd_dec->add_option("--pmf", dec.pmf, "pmf JSON (accepts `recind exact` output)")->required();
    cmd_dec->add_option("--out", dec.out, "output JSON (default stdout)");

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "streaming detector throughput");
    cmd_bench->add_option("--observations", bench.observations, "stream length");
    cmd_bench->add_option("-d,--d", bench.d, "dimension");
    cmd_bench->add_option("--mode", bench.mode, "chain or dominance")
        ->check(CLI::IsMember({"chain", "dominance"}));
    cmd_bench->add_option("--seed", bench.seed, "stream seed");
    cmd_bench->add_option("--out", bench.out, "output JSON (default stdout)");
    cmd_bench->add_option("--trace", bench.trace, "front-size trace CSV");

    try {
        app.parse(argc, argv);
        if (cmd_ind->parsed()) run_indicators(ind);
        if (cmd_exact->parsed()) run_exact(exact);
        if (cmd_sim->parsed()) run_simulate(sim);
        if (cmd_dec->parsed()) run_decompose(dec);
        if (cmd_bench->parsed()) run_bench(bench);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    } catch (const CapError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCap;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
