#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "frustra/events.hpp"
#include "frustra/groundstate.hpp"
#include "frustra/instance.hpp"
#include "frustra/lattice.hpp"
#include "frustra/rng.hpp"

namespace frustra {

// --- estimation plumbing -----------------------------------------------------

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval; contains p_hat by construction. The bounds are
/// pinned to exactly 0 and 1 at the extreme counts (the closed form lands
/// there only up to rounding).
inline WilsonInterval wilson_interval(long count, long trials, double z = 1.959963984540054) {
    if (trials <= 0) return {0.0, 0.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(count) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    WilsonInterval w{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (count == 0) w.lo = 0.0;
    if (count == trials) w.hi = 1.0;
    return w;
}

// --- planting ----------------------------------------------------------------

namespace detail {

/// Edges whose |J| enters the isolation sum for a boundary plaquette row:
/// the middle plaquette's four edges plus every vertical edge incident to a
/// vertex of the row's plaquettes.
inline std::vector<int> isolation_sum_edges(const StripLattice& lattice, int row) {
    const int k = lattice.k();
    const int j_low = row - lattice.n();
    std::vector<char> in(lattice.edge_count(), 0);
    for (int e : lattice.plaquette_edges(k, row)) in[e] = 1;
    for (int i = -k; i <= k; ++i)
        for (int j : {j_low - 1, j_low, j_low + 1}) {
            if (j < -lattice.n() || j + 1 > lattice.n()) continue;
            in[lattice.vertical_edge_id(i, j)] = 1;
        }
    std::vector<int> out;
    for (int e = 0; e < lattice.edge_count(); ++e)
        if (in[e]) out.push_back(e);
    return out;
}

/// Horizontal edges of a plaquette row that the isolation definition
/// requires to be heavy (everything except the middle plaquette's own two).
inline std::vector<int> isolation_heavy_edges(const StripLattice& lattice, int row) {
    const int k = lattice.k();
    const int j_low = row - lattice.n();
    const auto m_edges = lattice.plaquette_edges(k, row);
    std::vector<int> out;
    for (int i = -k; i < k; ++i)
        for (int j : {j_low, j_low + 1}) {
            const int e = lattice.horizontal_edge_id(i, j);
            if (e != m_edges[0] && e != m_edges[1]) out.push_back(e);
        }
    return out;
}

} // namespace detail

/// Planted isolated instance. Magnitudes are |gaussian|; the signs are all
/// positive except along the middle column of horizontal edges (i-span
/// [0,1], |j| <= n-1), whose flips frustrate exactly the two boundary-row
/// middle plaquettes; the isolation rows' remaining horizontal edges are
/// rescaled above the isolation sums. The result is isolated and forms a
/// regular pair with C(n-1,k), and does so at no smaller n.
inline CouplingAssignment plant_isolation(const StripLattice& lattice, std::uint64_t seed) {
    CouplingAssignment J = sample_couplings(lattice, seed);
    J.generator = "planted-isolation-v1";
    for (double& v : J.values) v = std::fabs(v);
    for (int j = -(lattice.n() - 1); j <= lattice.n() - 1; ++j) {
        const int e = lattice.horizontal_edge_id(0, j);
        J.values[e] = -J.values[e];
    }
    const int rows[2] = {0, lattice.plaquette_rows() - 1};
    double sums[2] = {0.0, 0.0};
    for (int t = 0; t < 2; ++t)
        for (int e : detail::isolation_sum_edges(lattice, rows[t]))
            sums[t] += std::fabs(J.values[e]);
    for (int t = 0; t < 2; ++t)
        for (int e : detail::isolation_heavy_edges(lattice, rows[t]))
            J.values[e] = sums[t] + 1.0 + J.values[e];
    return J;
}

/// Planted instance on C(n',k) whose restriction to C(n,k) is exactly
/// plant-isolation shaped, extended so that C(n',k), C(n'-1,k) is again a
/// regular pair: the middle-column sign flips resume above and below the
/// old strip (|j| in [n+1, n'-1]), leaving the old boundary rows' middles
/// frustrated and frustrating the new ones. Requires n' >= n+2.
inline CouplingAssignment plant_extended(int n, int k, int n_prime, std::uint64_t seed) {
    if (n_prime < n + 2)
        throw std::invalid_argument("plant_extended: need n' >= n+2");
    const StripLattice big(n_prime, k);
    CouplingAssignment J = sample_couplings(big, seed);
    J.generator = "planted-extension-v1";
    for (double& v : J.values) v = std::fabs(v);
    for (int j = -(n - 1); j <= n - 1; ++j)
        J.values[big.horizontal_edge_id(0, j)] *= -1.0;
    for (int j = n + 1; j <= n_prime - 1; ++j) {
        J.values[big.horizontal_edge_id(0, j)] *= -1.0;
        J.values[big.horizontal_edge_id(0, -j)] *= -1.0;
    }
    // Heavy rows of the inner strip, with sums taken over the inner strip's
    // own edge set (that is where isolation is checked).
    const StripLattice small(n, k);
    const int small_rows[2] = {0, small.plaquette_rows() - 1};
    for (const int row : small_rows) {
        double sum = 0.0;
        for (int e : detail::isolation_sum_edges(small, row)) {
            const auto [a, b] = small.edge_endpoints(e);
            sum += std::fabs(J.values[big.edge_between(a, b)]);
        }
        for (int e : detail::isolation_heavy_edges(small, row)) {
            const auto [a, b] = small.edge_endpoints(e);
            const int be = big.edge_between(a, b);
            J.values[be] = sum + 1.0 + J.values[be];
        }
    }
    return J;
}

inline Instance make_planted_instance(const StripLattice& lattice, std::uint64_t seed) {
    Instance inst;
    inst.n = lattice.n();
    inst.k = lattice.k();
    inst.seed = seed;
    inst.mode = InstanceMode::Planted;
    inst.couplings = plant_isolation(lattice, seed);
    inst.weights = weights_from_couplings(*inst.couplings);
    inst.frustration = frustration_from_couplings(lattice, *inst.couplings);
    return inst;
}

// --- regular-pair rejection sampling ------------------------------------------

namespace detail {

/// Sign-only regularity test, bit-packed for the rejection loop: coupling
/// signs are independent of |J|, so signs can be sampled and screened first.
class RegularPairScreen {
public:
    RegularPairScreen(const StripLattice& Ln, int m) : lattice_(Ln), m_(m) {
        const int n = Ln.n(), k = Ln.k();
        words_ = (Ln.edge_count() + 63) / 64;
        for (int row = n + m; row < 2 * n; ++row)
            for (int col = 0; col < 2 * k; ++col)
                du_.push_back({Ln.plaquette_edges(col, row), col == k && row == n + m});
        for (int row = 0; row <= n - m - 1; ++row)
            for (int col = 0; col < 2 * k; ++col)
                dl_.push_back({Ln.plaquette_edges(col, row), col == k && row == n - m - 1});
        for (int kp = 1; kp <= k; ++kp) {
            boundaries_.push_back(box_edges(kp, n));
            boundaries_.push_back(box_edges(kp, m));
        }
    }

    /// Draws one sign pattern; true iff it satisfies the regular-pair sign
    /// conditions. On success the signs are written to `negative`.
    bool try_sample(Rng& rng, std::vector<char>& negative) const {
        std::uint64_t w[8];
        for (int t = 0; t < words_; ++t) w[t] = rng.next_u64();
        auto neg = [&](int e) { return (w[e >> 6] >> (e & 63)) & 1ULL; };
        for (const auto& [edges, want] : du_) {
            const bool f = (neg(edges[0]) ^ neg(edges[1]) ^ neg(edges[2]) ^ neg(edges[3])) != 0;
            if (f != want) return false;
        }
        for (const auto& [edges, want] : dl_) {
            const bool f = (neg(edges[0]) ^ neg(edges[1]) ^ neg(edges[2]) ^ neg(edges[3])) != 0;
            if (f != want) return false;
        }
        for (const auto& edges : boundaries_) {
            int parity = 0;
            for (int e : edges) parity ^= static_cast<int>(neg(e));
            if (parity) return false;
        }
        negative.assign(lattice_.edge_count(), 0);
        for (int e = 0; e < lattice_.edge_count(); ++e) negative[e] = static_cast<char>(neg(e));
        return true;
    }

private:
    std::vector<int> box_edges(int a, int b) const {
        std::vector<int> out;
        for (int i = -a; i < a; ++i) {
            out.push_back(lattice_.edge_between({i, -b}, {i + 1, -b}));
            out.push_back(lattice_.edge_between({i, b}, {i + 1, b}));
        }
        for (int j = -b; j < b; ++j) {
            out.push_back(lattice_.edge_between({-a, j}, {-a, j + 1}));
            out.push_back(lattice_.edge_between({a, j}, {a, j + 1}));
        }
        return out;
    }

    const StripLattice& lattice_;
    int m_;
    int words_ = 0;
    std::vector<std::pair<std::array<int, 4>, bool>> du_, dl_;
    std::vector<std::vector<int>> boundaries_;
};

} // namespace detail

/// Gaussian couplings on C(n,k) rejection-sampled on the event that
/// C(n,k), C(n-1,k) is a regular pair. Returns nothing if max_attempts sign
/// patterns all fail.
inline std::optional<CouplingAssignment> sample_regular_pair(const StripLattice& Ln,
                                                             std::uint64_t seed,
                                                             long max_attempts,
                                                             long* attempts_out = nullptr) {
    if (Ln.edge_count() > 512)
        throw std::invalid_argument("sample_regular_pair: lattice too large for the screen");
    const detail::RegularPairScreen screen(Ln, Ln.n() - 1);
    Rng rng(splitmix64(seed ^ 0x5E6A7ULL));
    std::vector<char> negative;
    for (long attempt = 1; attempt <= max_attempts; ++attempt) {
        if (!screen.try_sample(rng, negative)) continue;
        if (attempts_out) *attempts_out = attempt;
        CouplingAssignment J = sample_couplings(Ln, splitmix64(seed ^ 0xC0FFEEULL));
        J.generator = "gauss-regular-pair-v1";
        for (int e = 0; e < Ln.edge_count(); ++e) {
            J.values[e] = std::fabs(J.values[e]);
            if (negative[e]) J.values[e] = -J.values[e];
        }
        return J;
    }
    if (attempts_out) *attempts_out = max_attempts;
    return std::nullopt;
}

/// Smallest n in (k, n_max] at which C(n,k), C(n-1,k) is a regular pair and
/// C(n,k) is isolated (R(n,k)); nullopt when none exists below the cap.
inline std::optional<int> find_first_regular(const CouplingAssignment& J, int k, int n_max) {
    const StripLattice big(n_max, k);
    if (static_cast<int>(J.values.size()) != big.edge_count())
        throw std::invalid_argument("find_first_regular: J must cover C(n_max,k)");
    for (int n = k + 1; n <= n_max; ++n) {
        const StripLattice Ln(n, k);
        const StripLattice Lm(n - 1, k);
        const CouplingAssignment Jn = restrict_couplings(big, J, Ln);
        if (is_regular_pair(Ln, Lm, Jn) && is_isolated(Ln, Jn)) return n;
    }
    return std::nullopt;
}

// --- sub-instance extraction ---------------------------------------------------

/// The dual-side view of an instance restricted to C(n',k') inside C(n,k):
/// extended dual of the sub-strip, dual-edge weights, and T intersected.
struct DualSubInstance {
    StripLattice lattice;
    ExtendedDual ext;
    std::vector<double> dual_weights;
    FrustrationSet T;
};

inline DualSubInstance restrict_dual_instance(const Instance& inst, int k_prime, int n_prime) {
    if (k_prime < 1 || k_prime > inst.k || n_prime < 1 || n_prime > inst.n)
        throw std::invalid_argument("restrict_dual_instance: bad sub-strip");
    const StripLattice big = inst.lattice();
    StripLattice sub(n_prime, k_prime);
    PlaquetteGrid grid(sub);
    std::vector<double> w(grid.edge_count());
    for (int d = 0; d < grid.edge_count(); ++d) {
        const auto [a, b] = sub.edge_endpoints(grid.edge(d).primal_edge);
        w[d] = inst.weights[big.edge_between(a, b)];
    }
    FrustrationSet T;
    const int col0 = inst.k - k_prime;
    const int row0 = inst.n - n_prime;
    for (int p : inst.frustration) {
        const auto [col, row] = big.plaquette_col_row(p);
        if (col >= col0 && col < col0 + 2 * k_prime && row >= row0 && row < row0 + 2 * n_prime)
            T.push_back(grid.plaquette_id(col - col0, row - row0));
    }
    std::sort(T.begin(), T.end());
    return DualSubInstance{std::move(sub), ExtendedDual(std::move(grid)), std::move(w),
                           std::move(T)};
}

// --- experiment configuration ---------------------------------------------------

enum class Sampling { Dual, Signed };
enum class Conditioning { None, Rejection, Planted };
enum class Estimator { G, Conj3, ConjB3 };

struct ExperimentConfig {
    std::vector<int> ks = {2};
    int n_override = -1; // -1: use n = 2k
    long trials = 0;
    std::uint64_t master_seed = 1;
    double radius = 100.0;
    double density_side_coeff = 100.0;
    double density_threshold = 0.01;
    Sampling sampling = Sampling::Dual;
    Conditioning conditioning = Conditioning::None;
    Estimator estimator = Estimator::G;
    int c_constant = 1;
    long max_attempts_per_trial = 1000;
    int jobs = 0; // 0: hardware concurrency
    int witness_cap = 5;
    std::string out_dir;

    int n_for(int k) const { return n_override > 0 ? n_override : 2 * k; }

    PathEventParams path_params() const {
        PathEventParams p;
        p.radius = radius;
        p.density_side_coeff = density_side_coeff;
        p.density_threshold = density_threshold;
        return p;
    }

    void validate() const {
        if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
        if (ks.empty()) throw std::invalid_argument("config: need at least one k");
        for (int k : ks) {
            if (k < 1) throw std::invalid_argument("config: k must be >= 1");
            if (n_for(k) <= (sampling == Sampling::Signed ? 1 : 0))
                throw std::invalid_argument("config: n too small");
        }
        if (radius < 0.0) throw std::invalid_argument("config: radius must be >= 0");
        if (max_attempts_per_trial < 1)
            throw std::invalid_argument("config: max attempts must be >= 1");
    }
};

struct EventCounts {
    long regular = 0;
    long isolated = 0;
    long dually_isolated = 0;
    long A = 0;
    long BA = 0;
    long D = 0;
    long BD = 0;
};

struct WitnessSample {
    int k = 0;
    long trial = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<double, double>> coords; // ordered vertex centers
    double min_distance = 0.0;
    double density = 0.0;
};

struct PerKReport {
    int k = 0;
    int n = 0;
    long trials = 0;   // trials counted toward estimates
    long failures = 0; // trials that threw; excluded from counts
    bool insufficient_mass = false;
    EventCounts counts;
    double p_hat = 0.0; // primary event: D (dual) or A (signed)
    WilsonInterval ci95;
    double mean_attempts = 0.0;
    double mean_delta_edges = 0.0;
    std::vector<WitnessSample> witnesses;
};

struct ConjectureFit {
    bool valid = false;
    double c = 0.0;
    double epsilon = 0.0;
    double sse = 0.0;
};

struct TrialReport {
    ExperimentConfig config;
    std::vector<PerKReport> per_k;
    long lemma1_violations = 0;
    long obs1_violations = 0;
    long flag_implication_violations = 0; // BA without A, or BD without D
    std::optional<ConjectureFit> fit;
};

// --- manifest ----------------------------------------------------------------

/// Appends one line per completed trial, flushing only the contiguous prefix
/// of trial indices, so the file content never depends on worker scheduling
/// and after an interruption it lists exactly the first t completed trials.
class ManifestWriter {
public:
    explicit ManifestWriter(const std::string& path, std::size_t total)
        : out_(path, std::ios::trunc), lines_(total) {}

    void deposit(std::size_t index, std::string line) {
        std::lock_guard<std::mutex> lock(mu_);
        lines_[index] = std::move(line);
        while (next_ < lines_.size() && lines_[next_]) {
            out_ << *lines_[next_] << "\n";
            lines_[next_].reset();
            ++next_;
        }
        out_.flush();
    }

    bool complete() const { return next_ == lines_.size(); }

private:
    std::ofstream out_;
    std::mutex mu_;
    std::size_t next_ = 0;
    std::vector<std::optional<std::string>> lines_;
};

namespace detail {

inline void parallel_for(long total, int jobs, const std::function<void(long)>& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || total <= 1) {
        for (long i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
            try {
                while (true) {
                    const long i = next.fetch_add(1);
                    if (i >= total) break;
                    fn(i);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

} // namespace detail

// --- the experiment driver -----------------------------------------------------

struct TrialOutcome {
    std::uint64_t seed = 0;
    EventFlags flags;
    long attempts = 1;
    bool counted = false;
    std::string error;
    std::vector<std::pair<double, double>> witness_coords;
};

namespace detail {

inline std::vector<std::pair<double, double>> witness_coords(const ExtendedDual& g,
                                                             const WitnessPath& w,
                                                             int start_vertex) {
    std::vector<std::pair<double, double>> coords;
    coords.push_back(g.vertex_center(start_vertex));
    int v = start_vertex;
    for (int e : w.edges) {
        v = g.other_end(e, v);
        coords.push_back(g.vertex_center(v));
    }
    return coords;
}

/// Conjecture conditioning on a dual instance: no dually isolated C(n',k)
/// for n' <= n, and the near-origin event already holds on every
/// intermediate width c+1 < k' < k (D for conj3, BD for conj b3).
inline bool conjecture_conditions_hold(const Instance& inst, const ExperimentConfig& cfg) {
    for (int n_prime = 1; n_prime <= inst.n; ++n_prime) {
        const DualSubInstance sub = restrict_dual_instance(inst, inst.k, n_prime);
        if (is_dually_isolated(sub.ext, sub.dual_weights, sub.T)) return false;
    }
    for (int k_prime = cfg.c_constant + 2; k_prime < inst.k; ++k_prime) {
        const DualSubInstance sub = restrict_dual_instance(inst, k_prime, inst.n);
        const EventFlags f = detect_dual(sub.ext, sub.dual_weights, sub.T, cfg.path_params());
        const bool ok = cfg.estimator == Estimator::ConjB3 ? f.BD : f.D;
        if (!ok) return false;
    }
    return true;
}

inline TrialOutcome run_dual_trial(const StripLattice& lattice, const ExperimentConfig& cfg,
                                   std::uint64_t trial_seed) {
    TrialOutcome out;
    out.seed = trial_seed;
    const bool conditioned = cfg.conditioning == Conditioning::Rejection &&
                             cfg.estimator != Estimator::G;
    const long max_attempts = conditioned ? cfg.max_attempts_per_trial : 1;
    for (long attempt = 0; attempt < max_attempts; ++attempt) {
        const std::uint64_t attempt_seed = derive_seed(trial_seed, 7, attempt);
        Instance inst;
        if (cfg.conditioning == Conditioning::Planted) {
            inst = make_planted_instance(lattice, attempt_seed);
            // Planted signed instances translate to the dual through |J|, T.
            inst.mode = InstanceMode::Planted;
        } else {
            inst = make_dual_instance(lattice, attempt_seed);
        }
        if (conditioned && !conjecture_conditions_hold(inst, cfg)) continue;
        out.attempts = attempt + 1;
        const DualSubInstance full = restrict_dual_instance(inst, inst.k, inst.n);
        out.flags = detect_dual(full.ext, full.dual_weights, full.T, cfg.path_params());
        if (out.flags.witness)
            out.witness_coords = witness_coords(full.ext, *out.flags.witness,
                                                out.flags.witness->start_vertex);
        out.counted = true;
        return out;
    }
    out.attempts = max_attempts;
    out.counted = false; // conditioning mass exhausted
    return out;
}

inline TrialOutcome run_signed_trial(const StripLattice& lattice, const ExperimentConfig& cfg,
                                     std::uint64_t trial_seed) {
    TrialOutcome out;
    out.seed = trial_seed;
    CouplingAssignment J;
    if (cfg.conditioning == Conditioning::Planted) {
        J = plant_isolation(lattice, trial_seed);
        out.attempts = 1;
    } else if (cfg.conditioning == Conditioning::Rejection) {
        long attempts = 0;
        auto sampled =
            sample_regular_pair(lattice, trial_seed, cfg.max_attempts_per_trial, &attempts);
        out.attempts = attempts;
        if (!sampled) {
            out.counted = false;
            return out;
        }
        J = std::move(*sampled);
    } else {
        J = sample_couplings(lattice, trial_seed);
        out.attempts = 1;
    }
    out.flags = detect_primal(lattice, J, cfg.path_params());
    if (out.flags.witness && out.flags.structure_ok) {
        const ExtendedDual ext{PlaquetteGrid(lattice)};
        out.witness_coords =
            witness_coords(ext, *out.flags.witness, out.flags.witness->start_vertex);
    }
    out.counted = true;
    return out;
}

} // namespace detail

/// Descriptive least-squares fit of p(k) ~ 1 - (k-c)^-1 (log(k-c))^-(1+eps)
/// over a small grid of (c, eps). Never asserted, only reported.
inline ConjectureFit fit_conjecture_curve(const TrialReport& report);

/// Core experiment driver: for every k, `trials` seeded trials, optionally
/// conditioned; aggregates counts, Wilson intervals and violation counters.
/// Deterministic in (config, master seed) regardless of the jobs setting.
/// run_experiment (report_io.hpp) adds the on-disk artifacts.
inline TrialReport run_trials(const ExperimentConfig& cfg, ManifestWriter* manifest = nullptr) {
    cfg.validate();
    TrialReport report;
    report.config = cfg;

    std::size_t manifest_offset = 0;
    for (std::size_t kslot = 0; kslot < cfg.ks.size(); ++kslot) {
        const int k = cfg.ks[kslot];
        const int n = cfg.n_for(k);
        const StripLattice lattice(n, k);

        std::vector<TrialOutcome> outcomes(cfg.trials);
        detail::parallel_for(cfg.trials, cfg.jobs, [&](long i) {
            const std::uint64_t trial_seed = derive_seed(cfg.master_seed, k, i);
            TrialOutcome out;
            try {
                out = cfg.sampling == Sampling::Dual
                          ? detail::run_dual_trial(lattice, cfg, trial_seed)
                          : detail::run_signed_trial(lattice, cfg, trial_seed);
            } catch (const std::exception& ex) {
                out.seed = trial_seed;
                out.error = ex.what();
                out.counted = false;
            }
            if (i >= cfg.witness_cap) out.witness_coords.clear(); // only sampled ones kept
            outcomes[i] = std::move(out);
            if (manifest) {
                std::ostringstream line;
                line << "k=" << k << " trial=" << i << " seed=" << trial_seed;
                manifest->deposit(manifest_offset + i, line.str());
            }
        });
        manifest_offset += cfg.trials;

        PerKReport pk;
        pk.k = k;
        pk.n = n;
        double attempts_sum = 0.0;
        double delta_sum = 0.0;
        long insufficient = 0;
        for (long i = 0; i < cfg.trials; ++i) {
            const TrialOutcome& out = outcomes[i];
            if (!out.error.empty()) {
                ++pk.failures;
                continue;
            }
            if (!out.counted) {
                ++insufficient;
                continue;
            }
            ++pk.trials;
            attempts_sum += static_cast<double>(out.attempts);
            delta_sum += static_cast<double>(out.flags.delta_edges);
            const EventFlags& f = out.flags;
            pk.counts.regular += f.regular_pair;
            pk.counts.isolated += f.isolated;
            pk.counts.dually_isolated += f.dually_isolated;
            pk.counts.A += f.A;
            pk.counts.BA += f.BA;
            pk.counts.D += f.D;
            pk.counts.BD += f.BD;
            if (f.BA && !f.A) ++report.flag_implication_violations;
            if (f.BD && !f.D) ++report.flag_implication_violations;
            if (cfg.sampling == Sampling::Signed && f.regular_pair && !f.structure_ok)
                ++report.lemma1_violations;
            if (static_cast<int>(pk.witnesses.size()) < cfg.witness_cap &&
                !out.witness_coords.empty()) {
                WitnessSample ws;
                ws.k = k;
                ws.trial = i;
                ws.seed = out.seed;
                ws.coords = out.witness_coords;
                ws.min_distance = f.witness ? f.witness->min_distance : 0.0;
                ws.density = f.witness ? f.witness->density : 0.0;
                pk.witnesses.push_back(std::move(ws));
            }
        }
        pk.insufficient_mass = pk.trials == 0;
        if (pk.trials > 0) {
            // The primary event follows the estimator: the B-variants estimate
            // the density-strengthened flags.
            const bool b_variant = cfg.estimator == Estimator::ConjB3;
            const long primary = cfg.sampling == Sampling::Dual
                                     ? (b_variant ? pk.counts.BD : pk.counts.D)
                                     : (b_variant ? pk.counts.BA : pk.counts.A);
            pk.p_hat = static_cast<double>(primary) / static_cast<double>(pk.trials);
            pk.ci95 = wilson_interval(primary, pk.trials);
            pk.mean_attempts = attempts_sum / static_cast<double>(pk.trials);
            pk.mean_delta_edges = delta_sum / static_cast<double>(pk.trials);
        }
        report.per_k.push_back(std::move(pk));
    }

    if (cfg.estimator != Estimator::G) report.fit = fit_conjecture_curve(report);
    return report;
}

inline ConjectureFit fit_conjecture_curve(const TrialReport& report) {
    ConjectureFit fit;
    std::vector<std::pair<int, double>> points;
    for (const auto& pk : report.per_k)
        if (!pk.insufficient_mass && pk.trials > 0) points.push_back({pk.k, pk.p_hat});
    if (points.size() < 2) return fit;
    int kmin = points.front().first;
    for (const auto& [k, p] : points) kmin = std::min(kmin, k);
    for (int c = 0; c <= kmin - 2; ++c) {
        for (double eps = 0.05; eps <= 3.0; eps += 0.05) {
            double sse = 0.0;
            bool ok = true;
            for (const auto& [k, p] : points) {
                const double x = static_cast<double>(k - c);
                if (x < 2.0) {
                    ok = false;
                    break;
                }
                const double pred = 1.0 - std::pow(x, -1.0) * std::pow(std::log(x), -1.0 - eps);
                sse += (p - pred) * (p - pred);
            }
            if (ok && (!fit.valid || sse < fit.sse)) {
                fit.valid = true;
                fit.c = c;
                fit.epsilon = eps;
                fit.sse = sse;
            }
        }
    }
    return fit;
}

/// Lemma 5.4 estimator: dual sampling, unconditioned.
inline TrialReport estimate_g(ExperimentConfig cfg) {
    cfg.sampling = Sampling::Dual;
    cfg.estimator = Estimator::G;
    return run_trials(cfg);
}

/// Conditional estimator for the nested conjectures (conj3 / conj b3) under
/// rejection or planted conditioning.
inline TrialReport estimate_conjecture(ExperimentConfig cfg, Estimator kind) {
    if (kind == Estimator::G) throw std::invalid_argument("estimate_conjecture: use estimate_g");
    cfg.sampling = Sampling::Dual;
    cfg.estimator = kind;
    if (cfg.conditioning == Conditioning::None) cfg.conditioning = Conditioning::Rejection;
    return run_trials(cfg);
}

} // namespace frustra
