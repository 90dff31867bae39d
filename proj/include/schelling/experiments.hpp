// experiments.hpp
// Behaviour classification, repeated trials, phase sweeps, Monte Carlo event
// estimates and planted-structure runs.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "schelling/dynamics.hpp"
#include "schelling/structures.hpp"

namespace schelling {

enum class BehaviorLabel {
    StaticAE,
    AlphaTakeoverAE,
    BetaTakeoverAE,
    AlphaTakeoverTotal,
    BetaTakeoverTotal,
    Unclassified,
};
inline constexpr std::size_t kLabelCount = 6;

// static_ae, alpha_takeover_ae, ..., unclassified
std::string_view to_string(BehaviorLabel label);

// Fraction of nodes with the same type in both configurations.
double unchanged_fraction(const Configuration& initial, const Configuration& final);
double alpha_fraction(const Configuration& config);

// Total (monochrome final) beats AE (final fraction of one type >= 1 - eps),
// which beats static (unchanged fraction >= 1 - eps). Throws ParameterError
// on mismatched params or eps outside (0, 0.5).
BehaviorLabel classify_run(const Configuration& initial, const Configuration& final, double epsilon);

struct Interval {
    double lo = 0;
    double hi = 0;
};

// Wilson score interval for successes / trials at normal quantile z.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.96);
// Normal-approximation interval for the mean of values in [0, 1], clamped.
Interval mean_interval(const std::vector<double>& values, double z = 1.96);

struct TrialRecord {
    std::uint64_t seed = 0;
    std::uint64_t stages = 0;
    double unchanged_fraction = 0;
    double alpha_fraction = 0;
    bool terminated = false;
    BehaviorLabel label = BehaviorLabel::Unclassified;
};

struct TrialStats {
    std::uint64_t runs = 0;
    double mean_unchanged_fraction = 0;
    double mean_alpha_fraction_final = 0;
    std::uint64_t all_beta_count = 0;
    std::uint64_t all_alpha_count = 0;
    std::uint64_t nonterminated_count = 0;
    Interval unchanged_ci;
    Interval alpha_fraction_ci;
    Interval all_beta_ci;
    Interval all_alpha_ci;
    std::array<std::uint64_t, kLabelCount> label_counts{};
    std::vector<TrialRecord> trials;  // in seed-list order

    std::uint64_t votes(BehaviorLabel l) const { return label_counts[static_cast<std::size_t>(l)]; }
    // Most frequent label; ties go to the earlier label in enum order.
    BehaviorLabel majority() const;
};

// One run per seed (random_config(params, seed)). Runs execute on up to
// `jobs` threads; results are folded in seed-list order. Throws
// ParameterError for an empty seed list.
TrialStats run_trials(const ModelParams& params, const std::vector<std::uint64_t>& seeds, double epsilon,
                      const RunOptions& options = {}, int jobs = 1);

// seed,stages,unchanged_fraction,alpha_fraction,terminated
void write_trials_csv(std::ostream& out, const TrialStats& stats);

// Label predicted from kappa (kappa* in 3D) and the sufficiently-less
// relations, or "grey" when no regime applies. Uses the math module only.
std::string predicted_label(int dim, double tau_alpha, double tau_beta);

// Observed label meets the prediction. A total takeover also meets a
// predicted takeover almost everywhere of the same type. Never true for "grey".
bool agrees_with_prediction(BehaviorLabel observed, const std::string& predicted);

struct SweepCell {
    Rational tau_alpha;
    Rational tau_beta;
    TrialStats stats;
    BehaviorLabel label = BehaviorLabel::Unclassified;
    std::string predicted;
};

// Each cell uses base params with its own intolerances and seeds
// derive_seed(master_seed, i) for i < seeds_per_cell. Cells run in grid order;
// trials inside a cell use up to `jobs` threads.
std::vector<SweepCell> sweep_phase(const std::vector<std::pair<Rational, Rational>>& tau_grid, const ModelParams& base,
                                   int seeds_per_cell, std::uint64_t master_seed, double epsilon,
                                   const RunOptions& options = {}, int jobs = 1);

// tau_alpha,tau_beta,label,runs,static_votes,alpha_ae_votes,beta_ae_votes,
// alpha_total_votes,beta_total_votes,predicted
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

struct EventEstimate {
    std::uint64_t trials = 0;
    std::uint64_t hits = 0;
    double estimate = 0;
    Interval ci95;
    Interval interval(double z) const { return wilson_interval(hits, trials, z); }
};

// Each trial fills a fresh window of side 2 event_reach + 1 with fair i.i.d.
// types and evaluates the event at its centre. Trials are grouped in blocks
// of 4096, block b drawing from mt19937_64 seeded with derive_seed(seed, b),
// so the result does not depend on `jobs`.
EventEstimate estimate_event_prob(const EventSpec& spec, int w, int dim, std::uint64_t trials, std::uint64_t seed,
                                  int jobs = 1);

struct PlantResult {
    RunResult run;
    // Largest monochrome disc radius of the plant type about the plant centre,
    // after planting (entry 0) and after every stage.
    std::vector<int> radius_trace;
    bool plant_preserved = true;  // every planted node kept the plant type throughout
};

// random_config(params, seed), overwrite `plant` with `type`, run. The trace
// is capped at min(n/2 - 1, trace_cap).
PlantResult plant_and_run(const ModelParams& params, const Region& plant, NodeType type, std::uint64_t seed,
                          const RunOptions& options = {}, int trace_cap = 1 << 30);

// Stage-by-stage comparison of the incremental engine with the naive
// reference engine (lexicographic order).
struct OracleReport {
    bool agree = true;
    std::uint64_t stages = 0;               // stages compared
    std::int64_t first_mismatch_stage = -1;  // -1 when agree
};
OracleReport compare_with_reference(const Configuration& initial, std::uint64_t max_stages = 0);

// Intolerance pairs from every predicted regime, the takeover ones also with
// the types swapped, plus two grey cells.
const std::vector<std::pair<Rational, Rational>>& oracle_tau_pairs();

// Instance i of the oracle suite: pair i mod |pairs|, w = 1 + (i / |pairs|) mod 3,
// seed derive_seed(master_seed, i).
struct OracleInstance {
    ModelParams params;
    std::uint64_t seed = 0;
};
OracleInstance oracle_instance(int n, std::uint64_t master_seed, std::uint64_t i);

}  // namespace schelling
