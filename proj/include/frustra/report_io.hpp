#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "frustra/harness.hpp"

namespace frustra {

inline const char* to_string(Sampling s) {
    return s == Sampling::Dual ? "dual" : "signed";
}
inline const char* to_string(Conditioning c) {
    switch (c) {
        case Conditioning::None: return "none";
        case Conditioning::Rejection: return "rejection";
        case Conditioning::Planted: return "planted";
    }
    return "?";
}
inline const char* to_string(Estimator e) {
    switch (e) {
        case Estimator::G: return "g";
        case Estimator::Conj3: return "conj3";
        case Estimator::ConjB3: return "conj_b3";
    }
    return "?";
}

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace detail

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["ks"] = cfg.ks;
    j["n_override"] = cfg.n_override;
    j["trials"] = cfg.trials;
    j["seed"] = cfg.master_seed;
    j["radius"] = cfg.radius;
    j["density_side_coeff"] = cfg.density_side_coeff;
    j["density_threshold"] = cfg.density_threshold;
    j["sampling"] = to_string(cfg.sampling);
    j["conditioning"] = to_string(cfg.conditioning);
    j["estimator"] = to_string(cfg.estimator);
    j["c"] = cfg.c_constant;
    j["max_attempts_per_trial"] = cfg.max_attempts_per_trial;
    j["jobs"] = cfg.jobs;
    j["witness_cap"] = cfg.witness_cap;
    j["out"] = cfg.out_dir;
    return j;
}

inline nlohmann::ordered_json report_to_json(const TrialReport& report) {
    nlohmann::ordered_json j;
    j["config_echo"] = config_to_json(report.config);
    nlohmann::ordered_json per_k = nlohmann::ordered_json::array();
    for (const auto& pk : report.per_k) {
        nlohmann::ordered_json e;
        e["k"] = pk.k;
        e["n"] = pk.n;
        e["trials"] = pk.trials;
        e["failures"] = pk.failures;
        e["insufficient_mass"] = pk.insufficient_mass;
        e["counts"] = {{"regular", pk.counts.regular},
                       {"isolated", pk.counts.isolated},
                       {"dually_isolated", pk.counts.dually_isolated},
                       {"A", pk.counts.A},
                       {"BA", pk.counts.BA},
                       {"D", pk.counts.D},
                       {"BD", pk.counts.BD}};
        e["p_hat"] = pk.p_hat;
        e["ci95"] = {pk.ci95.lo, pk.ci95.hi};
        e["mean_attempts"] = pk.mean_attempts;
        e["mean_delta_edges"] = pk.mean_delta_edges;
        per_k.push_back(std::move(e));
    }
    j["per_k"] = std::move(per_k);
    j["violations"] = {{"lemma1", report.lemma1_violations},
                       {"obs1", report.obs1_violations},
                       {"flag_implication", report.flag_implication_violations}};
    j["seeds_manifest"] = {{"master_seed", report.config.master_seed},
                           {"derivation", "derive_seed(master, k, trial): two splitmix64 rounds"},
                           {"manifest_file", "manifest.txt"},
                           {"trials_per_k", report.config.trials}};
    if (report.fit && report.fit->valid) {
        j["fit"] = {{"c", report.fit->c},
                    {"epsilon", report.fit->epsilon},
                    {"sse", report.fit->sse}};
    }
    return j;
}

/// CSV rows: k,n,trials,event,count,p_hat,ci_lo,ci_hi. Dual sampling emits
/// D, BD, dually_isolated; signed sampling emits regular, isolated, A, BA.
inline std::string report_to_csv(const TrialReport& report) {
    std::string out = "k,n,trials,event,count,p_hat,ci_lo,ci_hi\n";
    const bool dual = report.config.sampling == Sampling::Dual;
    const std::vector<std::pair<const char*, long EventCounts::*>> events =
        dual ? std::vector<std::pair<const char*, long EventCounts::*>>{
                   {"D", &EventCounts::D},
                   {"BD", &EventCounts::BD},
                   {"dually_isolated", &EventCounts::dually_isolated}}
             : std::vector<std::pair<const char*, long EventCounts::*>>{
                   {"regular", &EventCounts::regular},
                   {"isolated", &EventCounts::isolated},
                   {"A", &EventCounts::A},
                   {"BA", &EventCounts::BA}};
    for (const auto& [name, member] : events) {
        for (const auto& pk : report.per_k) {
            const long count = pk.counts.*member;
            out += std::to_string(pk.k) + "," + std::to_string(pk.n) + "," +
                   std::to_string(pk.trials) + "," + name + ",";
            if (pk.trials > 0) {
                const double p = static_cast<double>(count) / static_cast<double>(pk.trials);
                const WilsonInterval ci = wilson_interval(count, pk.trials);
                out += std::to_string(count) + "," + detail::fmt_double(p) + "," +
                       detail::fmt_double(ci.lo) + "," + detail::fmt_double(ci.hi);
            } else {
                out += "0,nan,nan,nan";
            }
            out += "\n";
        }
    }
    return out;
}

inline std::string witnesses_to_jsonl(const TrialReport& report) {
    std::string out;
    for (const auto& pk : report.per_k) {
        for (const auto& ws : pk.witnesses) {
            nlohmann::ordered_json j;
            j["k"] = ws.k;
            j["trial"] = ws.trial;
            j["seed"] = ws.seed;
            j["min_distance"] = ws.min_distance;
            j["density"] = ws.density;
            nlohmann::ordered_json coords = nlohmann::ordered_json::array();
            for (const auto& [x, y] : ws.coords) coords.push_back({x, y});
            j["path"] = std::move(coords);
            out += j.dump();
            out += "\n";
        }
    }
    return out;
}

/// Runs the trials and, when out_dir is set, writes report.json,
/// frequencies.csv, witness.jsonl and manifest.txt into it. File contents
/// depend only on (config, master seed).
inline TrialReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::optional<ManifestWriter> manifest;
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        manifest.emplace(cfg.out_dir + "/manifest.txt",
                         cfg.ks.size() * static_cast<std::size_t>(cfg.trials));
    }
    TrialReport report = run_trials(cfg, manifest ? &*manifest : nullptr);
    if (!cfg.out_dir.empty()) {
        {
            std::ofstream f(cfg.out_dir + "/report.json", std::ios::trunc);
            if (!f) throw std::runtime_error("cannot write " + cfg.out_dir + "/report.json");
            f << report_to_json(report).dump(2) << "\n";
        }
        {
            std::ofstream f(cfg.out_dir + "/frequencies.csv", std::ios::trunc);
            if (!f) throw std::runtime_error("cannot write " + cfg.out_dir + "/frequencies.csv");
            f << report_to_csv(report);
        }
        {
            std::ofstream f(cfg.out_dir + "/witness.jsonl", std::ios::trunc);
            if (!f) throw std::runtime_error("cannot write " + cfg.out_dir + "/witness.jsonl");
            f << witnesses_to_jsonl(report);
        }
    }
    return report;
}

} // namespace frustra
