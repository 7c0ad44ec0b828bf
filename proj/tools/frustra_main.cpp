// frustra command line: generate strip-lattice spin-glass instances, solve
// them exactly via minimum T-joins, run the invariant suites and drive the
// Monte Carlo estimators.
//
// Exit codes: 0 success, 1 usage/input error, 2 internal invariant violation.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "frustra/frustra.hpp"

namespace {

using namespace frustra;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;

struct CommonFlags {
    int n = -1;
    int k = -1;
    std::uint64_t seed = 1;
    long trials = -1;
    double radius = 100.0;
    double density_side_coeff = 100.0;
    double density_threshold = 0.01;
    std::string mode;
    int jobs = 0;
    std::string out;
};

void apply_seed_env(std::uint64_t& seed) {
    // FRUSTRA_SEED overrides --seed whenever it is set.
    if (const char* env = std::getenv("FRUSTRA_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw std::invalid_argument("FRUSTRA_SEED is not an integer");
        seed = v;
    }
}

std::vector<int> parse_k_list(const std::string& text) {
    std::vector<int> ks;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        for (int k = lo; k <= hi; ++k) ks.push_back(k);
        return ks;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) ks.push_back(std::stoi(item));
    return ks;
}

// Flat key=value config files; '#' starts a comment. CLI flags override.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

Instance generate_instance(const StripLattice& lattice, std::uint64_t seed,
                           const std::string& mode) {
    if (mode == "signed" || mode.empty()) return make_signed_instance(lattice, seed);
    if (mode == "dual") return make_dual_instance(lattice, seed);
    if (mode == "planted") return make_planted_instance(lattice, seed);
    throw std::invalid_argument("unknown mode '" + mode + "' (signed|dual|planted)");
}

int cmd_gen(const CommonFlags& flags) {
    if (flags.n < 1 || flags.k < 1)
        throw std::invalid_argument("gen requires --n and --k");
    const StripLattice lattice(flags.n, flags.k);
    const Instance inst = generate_instance(lattice, flags.seed, flags.mode);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!flags.out.empty()) {
        file.open(flags.out, std::ios::trunc);
        if (!file) throw std::invalid_argument("cannot write '" + flags.out + "'");
        out = &file;
    }
    serialize(inst, *out);
    out->flush();

    std::cerr << "generated n=" << inst.n << " k=" << inst.k << " seed=" << inst.seed
              << " mode=" << to_string(inst.mode) << " edges=" << lattice.edge_count()
              << " frustrated=" << inst.frustration.size() << "\n";
    const PlaquetteGrid grid(lattice);
    for (int kp = 1; kp <= flags.k; ++kp) {
        const auto sub = sublattice_plaquettes(grid, kp);
        long cnt = 0;
        for (int p : inst.frustration)
            if (std::binary_search(sub.begin(), sub.end(), p)) ++cnt;
        std::cerr << "  |T ^ C(n," << kp << ")| = " << cnt
                  << (cnt % 2 == 0 ? " (even)" : " (odd)") << "\n";
    }
    return kExitOk;
}

PathEventParams params_from(const CommonFlags& flags) {
    PathEventParams p;
    p.radius = flags.radius;
    p.density_side_coeff = flags.density_side_coeff;
    p.density_threshold = flags.density_threshold;
    return p;
}

void emit_witness(const std::string& path, const ExtendedDual& ext, const WitnessPath& w) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::invalid_argument("cannot write '" + path + "'");
    nlohmann::ordered_json j;
    j["min_distance"] = w.min_distance;
    j["density"] = w.density;
    j["vertex_simple"] = w.vertex_simple;
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    int v = w.start_vertex;
    coords.push_back({ext.vertex_center(v).first, ext.vertex_center(v).second});
    for (int e : w.edges) {
        v = ext.other_end(e, v);
        coords.push_back({ext.vertex_center(v).first, ext.vertex_center(v).second});
    }
    j["path"] = std::move(coords);
    f << j.dump() << "\n";
}

int cmd_solve(const std::string& instance_path, const std::string& event,
              const CommonFlags& flags, const std::string& emit_path, bool check_oracle) {
    std::ifstream f(instance_path);
    if (!f) {
        std::cerr << "error: cannot open '" << instance_path << "'\n";
        return kExitUsage;
    }
    Instance inst;
    try {
        inst = deserialize(f);
    } catch (const ParseError& pe) {
        std::cerr << "parse error in '" << instance_path << "': " << pe.what() << "\n";
        return kExitUsage;
    }
    const StripLattice lattice = inst.lattice();
    const PathEventParams params = params_from(flags);

    if (event == "primal") {
        if (!inst.couplings)
            throw std::invalid_argument("primal event needs a signed instance");
        if (inst.n < 2)
            throw std::invalid_argument("primal event needs n >= 2 (the pair C(n,k), C(n-1,k))");
        const CGroundstate s = cgroundstate(lattice, *inst.couplings);
        const EventFlags fl = detect_primal(lattice, *inst.couplings, params);
        std::cout << "energy=" << s.energy << " dis_weight=" << s.dis_weight
                  << " tjoin_weight=" << s.join.weight << "\n";
        std::cout << "regular_pair=" << (fl.regular_pair ? "true" : "false")
                  << " isolated=" << (fl.isolated ? "true" : "false")
                  << " A=" << (fl.A ? "true" : "false")
                  << " BA=" << (fl.BA ? "true" : "false") << "\n";
        if (!emit_path.empty() && fl.witness && fl.structure_ok) {
            const ExtendedDual ext{PlaquetteGrid(lattice)};
            emit_witness(emit_path, ext, *fl.witness);
        }
        if (check_oracle) {
            const BruteForceState bf = brute_force_cgroundstate(lattice, *inst.couplings);
            const double scale = std::max(1.0, std::fabs(bf.energy));
            if (std::fabs(bf.energy - s.energy) <= 1e-9 * scale) {
                std::cout << "oracle: MATCH\n";
            } else {
                std::cout << "oracle: MISMATCH (exact " << s.energy << " vs brute force "
                          << bf.energy << ")\n";
                return kExitInvariant;
            }
        }
        return kExitOk;
    }
    if (event == "dual") {
        const DualSubInstance full = restrict_dual_instance(inst, inst.k, inst.n);
        const EventFlags fl = detect_dual(full.ext, full.dual_weights, full.T, params);
        std::cout << "r_weight=" << fl.r_weight << " s_weight=" << fl.s_weight
                  << " delta_edges=" << fl.delta_edges << "\n";
        std::cout << "D=" << (fl.D ? "true" : "false") << " BD=" << (fl.BD ? "true" : "false")
                  << " dually_isolated=" << (fl.dually_isolated ? "true" : "false") << "\n";
        if (!emit_path.empty() && fl.witness)
            emit_witness(emit_path, full.ext, *fl.witness);
        if (check_oracle) {
            const PlaquetteGrid& grid = full.ext.grid();
            WeightedGraph base(grid.vertex_count());
            for (int d = 0; d < grid.edge_count(); ++d)
                base.add_edge(grid.edge(d).p, grid.edge(d).q, full.dual_weights[d]);
            if (base.edge_count() > 24) {
                std::cout << "oracle: SKIPPED (more than 24 dual edges)\n";
            } else {
                const TJoinSolution oracle = brute_force_tjoin(base, full.T);
                const double scale = std::max(1.0, std::fabs(oracle.weight));
                if (std::fabs(oracle.weight - fl.r_weight) <= 1e-9 * scale) {
                    std::cout << "oracle: MATCH\n";
                } else {
                    std::cout << "oracle: MISMATCH (exact " << fl.r_weight
                              << " vs brute force " << oracle.weight << ")\n";
                    return kExitInvariant;
                }
            }
        }
        return kExitOk;
    }
    throw std::invalid_argument("--event must be primal or dual");
}

int cmd_verify(const std::string& suite, long seeds, const CommonFlags& flags) {
    VerifyResult res;
    if (suite == "lattice") {
        res = verify_lattice();
    } else if (suite == "tjoin") {
        res = verify_tjoin(seeds);
    } else if (suite == "duality") {
        res = verify_duality(seeds);
    } else if (suite == "lemma1") {
        const int k = flags.k > 0 ? flags.k : 2;
        const int n = flags.n > 0 ? flags.n : 2 * k;
        res = verify_lemma1(seeds, n, k);
    } else if (suite == "obs1") {
        res = verify_obs1(seeds);
    } else {
        throw std::invalid_argument(
            "unknown suite '" + suite + "' (lattice|tjoin|duality|lemma1|obs1)");
    }
    std::cout << (res.pass ? "PASS " : "FAIL ") << res.detail << "\n";
    return res.pass ? kExitOk : kExitInvariant;
}

ExperimentConfig config_from_file_and_flags(const std::string& config_path,
                                            const CommonFlags& flags, CLI::App* sub,
                                            const std::string& k_list) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = read_config_file(config_path);

    for (const auto& [key, value] : kv) {
        static const std::set<std::string> known{
            "k", "n", "seed", "trials", "radius", "density-side-coeff",
            "density-threshold", "jobs", "out", "c", "max-attempts", "witness-cap",
            "mode", "sampling", "conditioning", "estimator"};
        if (!known.count(key))
            throw std::invalid_argument("unknown config key '" + key + "'");
        (void)value;
    }
    auto has = [&](const char* key) { return kv.count(key) > 0; };
    if (has("k")) cfg.ks = parse_k_list(kv["k"]);
    if (has("n")) cfg.n_override = std::stoi(kv["n"]);
    if (has("seed")) cfg.master_seed = std::strtoull(kv["seed"].c_str(), nullptr, 10);
    if (has("trials")) cfg.trials = std::stol(kv["trials"]);
    if (has("radius")) cfg.radius = std::stod(kv["radius"]);
    if (has("density-side-coeff")) cfg.density_side_coeff = std::stod(kv["density-side-coeff"]);
    if (has("density-threshold")) cfg.density_threshold = std::stod(kv["density-threshold"]);
    if (has("jobs")) cfg.jobs = std::stoi(kv["jobs"]);
    if (has("out")) cfg.out_dir = kv["out"];
    if (has("c")) cfg.c_constant = std::stoi(kv["c"]);
    if (has("max-attempts")) cfg.max_attempts_per_trial = std::stol(kv["max-attempts"]);
    if (has("witness-cap")) cfg.witness_cap = std::stoi(kv["witness-cap"]);
    std::string mode = has("mode") ? kv["mode"] : "";
    const std::string sampling = has("sampling") ? kv["sampling"] : "";
    const std::string conditioning = has("conditioning") ? kv["conditioning"] : "";
    const std::string estimator = has("estimator") ? kv["estimator"] : "";

    // CLI flags override file values.
    if (!k_list.empty()) cfg.ks = parse_k_list(k_list);
    if (sub->count("--n")) cfg.n_override = flags.n;
    if (sub->count("--seed")) cfg.master_seed = flags.seed;
    if (sub->count("--trials")) cfg.trials = flags.trials;
    if (sub->count("--radius")) cfg.radius = flags.radius;
    if (sub->count("--density-side-coeff")) cfg.density_side_coeff = flags.density_side_coeff;
    if (sub->count("--density-threshold")) cfg.density_threshold = flags.density_threshold;
    if (sub->count("--jobs")) cfg.jobs = flags.jobs;
    if (sub->count("--out")) cfg.out_dir = flags.out;
    if (sub->count("--mode")) mode = flags.mode;

    if (!mode.empty()) {
        if (mode == "dual") {
            cfg.sampling = Sampling::Dual;
        } else if (mode == "signed") {
            cfg.sampling = Sampling::Signed;
        } else if (mode == "planted") {
            cfg.sampling = Sampling::Dual;
            cfg.conditioning = Conditioning::Planted;
        } else {
            throw std::invalid_argument("unknown mode '" + mode + "' (dual|signed|planted)");
        }
    }
    if (!sampling.empty()) {
        if (sampling == "dual") cfg.sampling = Sampling::Dual;
        else if (sampling == "signed") cfg.sampling = Sampling::Signed;
        else throw std::invalid_argument("unknown sampling '" + sampling + "'");
    }
    if (!conditioning.empty()) {
        if (conditioning == "none") cfg.conditioning = Conditioning::None;
        else if (conditioning == "rejection") cfg.conditioning = Conditioning::Rejection;
        else if (conditioning == "planted") cfg.conditioning = Conditioning::Planted;
        else throw std::invalid_argument("unknown conditioning '" + conditioning + "'");
    }
    if (!estimator.empty()) {
        if (estimator == "g") cfg.estimator = Estimator::G;
        else if (estimator == "conj3") cfg.estimator = Estimator::Conj3;
        else if (estimator == "conj_b3") cfg.estimator = Estimator::ConjB3;
        else throw std::invalid_argument("unknown estimator '" + estimator + "'");
    }
    apply_seed_env(cfg.master_seed);
    return cfg;
}

void print_per_k_table(const TrialReport& report) {
    std::printf("%4s %4s %8s %10s %10s %10s %8s\n", "k", "n", "trials", "p_hat", "ci_lo",
                "ci_hi", "event");
    const bool dual = report.config.sampling == Sampling::Dual;
    const bool b_variant = report.config.estimator == Estimator::ConjB3;
    const char* primary = dual ? (b_variant ? "BD" : "D") : (b_variant ? "BA" : "A");
    for (const auto& pk : report.per_k) {
        if (pk.insufficient_mass) {
            std::printf("%4d %4d %8ld %10s %10s %10s %8s\n", pk.k, pk.n, pk.trials, "-", "-",
                        "-", "insufficient conditioning mass");
            continue;
        }
        std::printf("%4d %4d %8ld %10.6f %10.6f %10.6f %8s\n", pk.k, pk.n, pk.trials, pk.p_hat,
                    pk.ci95.lo, pk.ci95.hi, primary);
    }
    if (report.fit && report.fit->valid)
        std::printf("fit: c=%.0f epsilon=%.2f sse=%.4g (descriptive only)\n", report.fit->c,
                    report.fit->epsilon, report.fit->sse);
    std::printf("violations: lemma1=%ld obs1=%ld flag_implication=%ld\n",
                report.lemma1_violations, report.obs1_violations,
                report.flag_implication_violations);
}

int cmd_estimate(const std::string& config_path, const CommonFlags& flags,
                 const std::string& k_list, CLI::App* sub) {
    ExperimentConfig cfg = config_from_file_and_flags(config_path, flags, sub, k_list);
    if (cfg.trials < 1)
        throw std::invalid_argument("estimate needs trials >= 1 (config or --trials)");
    std::cout << "config: " << config_to_json(cfg).dump() << "\n";
    const TrialReport report = run_experiment(cfg);
    print_per_k_table(report);
    if (!cfg.out_dir.empty())
        std::cout << "artifacts: " << cfg.out_dir
                  << "/{report.json,frequencies.csv,witness.jsonl,manifest.txt}\n";
    return kExitOk;
}

int cmd_report(const std::string& report_path, const std::string& out_csv) {
    std::ifstream f(report_path);
    if (!f) {
        std::cerr << "error: cannot open '" << report_path << "'\n";
        return kExitUsage;
    }
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& ex) {
        std::cerr << "error: bad report JSON: " << ex.what() << "\n";
        return kExitUsage;
    }
    std::printf("%4s %4s %8s %10s %10s %10s\n", "k", "n", "trials", "p_hat", "ci_lo", "ci_hi");
    for (const auto& pk : j.at("per_k")) {
        std::printf("%4d %4d %8ld %10.6f %10.6f %10.6f\n", pk.at("k").get<int>(),
                    pk.at("n").get<int>(), pk.at("trials").get<long>(),
                    pk.at("p_hat").get<double>(), pk.at("ci95")[0].get<double>(),
                    pk.at("ci95")[1].get<double>());
    }
    if (!out_csv.empty()) {
        std::ofstream out(out_csv, std::ios::trunc);
        out << "k,n,trials,event,count\n";
        for (const auto& pk : j.at("per_k"))
            for (const auto& [name, count] : pk.at("counts").items())
                out << pk.at("k").get<int>() << ',' << pk.at("n").get<int>() << ','
                    << pk.at("trials").get<long>() << ',' << name << ',' << count << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"frustra: strip-lattice spin glasses, exact T-joins and domain-wall events"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string event = "dual";
    std::string emit_path;
    std::string instance_path;
    std::string suite;
    std::string config_path;
    std::string report_path;
    std::string out_csv;
    std::string k_list;
    bool check_oracle = false;
    long seeds = 100;

    CLI::App* gen = app.add_subcommand("gen", "generate an instance file");
    gen->add_option("--n", flags.n, "half-height n")->required();
    gen->add_option("--k", flags.k, "half-width k")->required();
    gen->add_option("--seed", flags.seed, "seed (FRUSTRA_SEED overrides)");
    gen->add_option("--mode", flags.mode, "signed|dual|planted (default signed)");
    gen->add_option("--out", flags.out, "output file (default stdout)");

    CLI::App* solve = app.add_subcommand("solve", "solve one instance and report events");
    solve->add_option("instance", instance_path, "instance file")->required();
    solve->add_option("--event", event, "primal|dual (default dual)");
    solve->add_option("--radius", flags.radius, "near-origin radius (default 100)");
    solve->add_option("--density-side-coeff", flags.density_side_coeff,
                      "density square side coefficient");
    solve->add_option("--density-threshold", flags.density_threshold, "density threshold");
    solve->add_option("--emit-path", emit_path, "write the witness path as JSON");
    solve->add_flag("--check-oracle", check_oracle, "cross-check the brute-force oracle");

    CLI::App* verify = app.add_subcommand("verify", "run an invariant suite");
    verify->add_option("suite", suite, "lattice|tjoin|duality|lemma1|obs1")->required();
    verify->add_option("--seeds", seeds, "cases per suite (default 100)");
    verify->add_option("--n", flags.n, "lattice n for lemma1");
    verify->add_option("--k", flags.k, "lattice k for lemma1");

    CLI::App* estimate = app.add_subcommand("estimate", "run a Monte Carlo experiment");
    estimate->add_option("config", config_path, "flat key=value config file");
    estimate->add_option("--k", k_list, "k list, e.g. 2,3,4 or 2..5");
    estimate->add_option("--n", flags.n, "fixed n (default: n = 2k)");
    estimate->add_option("--seed", flags.seed, "master seed (FRUSTRA_SEED overrides)");
    estimate->add_option("--trials", flags.trials, "trials per k");
    estimate->add_option("--radius", flags.radius, "near-origin radius");
    estimate->add_option("--density-side-coeff", flags.density_side_coeff, "density side coeff");
    estimate->add_option("--density-threshold", flags.density_threshold, "density threshold");
    estimate->add_option("--mode", flags.mode, "dual|signed|planted");
    estimate->add_option("--jobs", flags.jobs, "worker threads (default: cores)");
    estimate->add_option("--out", flags.out, "artifact directory");

    CLI::App* report = app.add_subcommand("report", "print the per-k table of a report.json");
    report->add_option("report", report_path, "report.json path")->required();
    report->add_option("--out", out_csv, "re-emit a counts CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) {
            apply_seed_env(flags.seed);
            return cmd_gen(flags);
        }
        if (solve->parsed()) return cmd_solve(instance_path, event, flags, emit_path, check_oracle);
        if (verify->parsed()) return cmd_verify(suite, seeds, flags);
        if (estimate->parsed()) return cmd_estimate(config_path, flags, k_list, estimate);
        if (report->parsed()) return cmd_report(report_path, out_csv);
        std::cerr << "error: no subcommand\n";
        return kExitUsage;
    } catch (const ParseError& ex) {
        std::cerr << "parse error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const InvariantViolation& ex) {
        std::cerr << "invariant violation: " << ex.what() << "\n";
        return kExitInvariant;
    } catch (const std::logic_error& ex) {
        std::cerr << "internal invariant violation: " << ex.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitInvariant;
    }
}
