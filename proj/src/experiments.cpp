#include "schelling/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <random>
#include <thread>

#include "schelling/math.hpp"
#include "schelling/rng.hpp"

namespace schelling {

namespace {

// Calls body(i) for i in [0, count) on up to `jobs` threads.
template <class Body>
void parallel_for(std::size_t count, int jobs, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || failed.load())
                return;
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true))
                    error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

}  // namespace

std::string_view to_string(BehaviorLabel label) {
    switch (label) {
    case BehaviorLabel::StaticAE: return "static_ae";
    case BehaviorLabel::AlphaTakeoverAE: return "alpha_takeover_ae";
    case BehaviorLabel::BetaTakeoverAE: return "beta_takeover_ae";
    case BehaviorLabel::AlphaTakeoverTotal: return "alpha_takeover_total";
    case BehaviorLabel::BetaTakeoverTotal: return "beta_takeover_total";
    case BehaviorLabel::Unclassified: return "unclassified";
    }
    return "unclassified";
}

double unchanged_fraction(const Configuration& initial, const Configuration& final) {
    if (initial.size() != final.size() || initial.size() == 0)
        throw ParameterError("configurations differ in size");
    std::size_t same = 0;
    for (NodeId i = 0; i < initial.size(); ++i)
        same += initial[i] == final[i];
    return static_cast<double>(same) / static_cast<double>(initial.size());
}

double alpha_fraction(const Configuration& config) {
    if (config.size() == 0)
        throw ParameterError("empty configuration");
    return static_cast<double>(config.count(NodeType::Alpha)) / static_cast<double>(config.size());
}

BehaviorLabel classify_run(const Configuration& initial, const Configuration& final, double epsilon) {
    const ModelParams& a = initial.params();
    const ModelParams& b = final.params();
    if (a.dim != b.dim || a.n != b.n || a.w != b.w || a.tau_alpha != b.tau_alpha || a.tau_beta != b.tau_beta)
        throw ParameterError("classify_run: configurations have different params");
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ParameterError("classify_run: epsilon must lie in (0, 0.5)");

    const std::size_t alpha = final.count(NodeType::Alpha);
    if (alpha == final.size())
        return BehaviorLabel::AlphaTakeoverTotal;
    if (alpha == 0)
        return BehaviorLabel::BetaTakeoverTotal;
    const double fa = alpha_fraction(final);
    if (fa >= 1.0 - epsilon)
        return BehaviorLabel::AlphaTakeoverAE;
    if (1.0 - fa >= 1.0 - epsilon)
        return BehaviorLabel::BetaTakeoverAE;
    if (unchanged_fraction(initial, final) >= 1.0 - epsilon)
        return BehaviorLabel::StaticAE;
    return BehaviorLabel::Unclassified;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0)
        return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

Interval mean_interval(const std::vector<double>& values, double z) {
    if (values.empty())
        return {0.0, 1.0};
    const double n = static_cast<double>(values.size());
    double mean = 0;
    for (double v : values)
        mean += v;
    mean /= n;
    if (values.size() == 1)
        return {mean, mean};
    double ss = 0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    const double half = z * std::sqrt(ss / (n - 1) / n);
    return {std::max(0.0, mean - half), std::min(1.0, mean + half)};
}

BehaviorLabel TrialStats::majority() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kLabelCount; ++i)
        if (label_counts[i] > label_counts[best])
            best = i;
    return static_cast<BehaviorLabel>(best);
}

TrialStats run_trials(const ModelParams& params, const std::vector<std::uint64_t>& seeds, double epsilon,
                      const RunOptions& options, int jobs) {
    if (seeds.empty())
        throw ParameterError("run_trials needs at least one seed");
    params.validate();
    if (!(epsilon > 0.0 && epsilon < 0.5))
        throw ParameterError("epsilon must lie in (0, 0.5)");

    std::vector<TrialRecord> records(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        const Configuration initial = random_config(params, seeds[i]);
        const RunResult r = run(initial, options, seeds[i]);
        TrialRecord& rec = records[i];
        rec.seed = seeds[i];
        rec.stages = r.final.stage;
        rec.unchanged_fraction = unchanged_fraction(initial, r.final);
        rec.alpha_fraction = alpha_fraction(r.final);
        rec.terminated = r.terminated;
        rec.label = classify_run(initial, r.final, epsilon);
    });

    TrialStats s;
    s.runs = records.size();
    std::vector<double> unchanged, alpha;
    for (const TrialRecord& rec : records) {
        unchanged.push_back(rec.unchanged_fraction);
        alpha.push_back(rec.alpha_fraction);
        s.mean_unchanged_fraction += rec.unchanged_fraction;
        s.mean_alpha_fraction_final += rec.alpha_fraction;
        s.all_alpha_count += rec.label == BehaviorLabel::AlphaTakeoverTotal;
        s.all_beta_count += rec.label == BehaviorLabel::BetaTakeoverTotal;
        s.nonterminated_count += !rec.terminated;
        ++s.label_counts[static_cast<std::size_t>(rec.label)];
    }
    s.mean_unchanged_fraction /= static_cast<double>(s.runs);
    s.mean_alpha_fraction_final /= static_cast<double>(s.runs);
    s.unchanged_ci = mean_interval(unchanged);
    s.alpha_fraction_ci = mean_interval(alpha);
    s.all_beta_ci = wilson_interval(s.all_beta_count, s.runs);
    s.all_alpha_ci = wilson_interval(s.all_alpha_count, s.runs);
    s.trials = std::move(records);
    return s;
}

void write_trials_csv(std::ostream& out, const TrialStats& stats) {
    out << "seed,stages,unchanged_fraction,alpha_fraction,terminated\n";
    for (const TrialRecord& r : stats.trials)
        out << r.seed << ',' << r.stages << ',' << format_double(r.unchanged_fraction) << ','
            << format_double(r.alpha_fraction) << ',' << (r.terminated ? "true" : "false") << '\n';
}

std::string predicted_label(int dim, double ta, double tb) {
    using namespace math;
    const double k = dim == 3 ? kappa_3d().value : kappa_2d().value;
    auto less = [dim](double t0, double t1) {
        return t0 > 0.0 && t0 < 0.5 && t1 > 0.0 && t1 < 0.5 && (dim == 3 ? suff_less_3d(t0, t1) : suff_less_2d(t0, t1));
    };
    auto greater = [dim](double t0, double t1) {
        return t0 > 0.5 && t0 < 1.0 && t1 > 0.5 && t1 < 1.0 &&
               (dim == 3 ? suff_greater_3d(t0, t1) : suff_greater_2d(t0, t1));
    };
    const std::string static_ae(to_string(BehaviorLabel::StaticAE));
    if ((ta < 0.25 && tb < 0.25) || (ta > 0.75 && tb > 0.75))
        return static_ae;
    if (tb < 0.5 && ta > 0.5)
        return std::string(to_string(BehaviorLabel::BetaTakeoverTotal));
    if (ta < 0.5 && tb > 0.5)
        return std::string(to_string(BehaviorLabel::AlphaTakeoverTotal));
    // Takeover almost everywhere below and above 1/2, both type orders.
    if ((k < ta && ta < 0.5 && less(tb, ta)) || (0.5 < tb && tb < 1.0 - k && greater(ta, tb)))
        return std::string(to_string(BehaviorLabel::BetaTakeoverAE));
    if ((k < tb && tb < 0.5 && less(ta, tb)) || (0.5 < ta && ta < 1.0 - k && greater(tb, ta)))
        return std::string(to_string(BehaviorLabel::AlphaTakeoverAE));
    return "grey";
}

bool agrees_with_prediction(BehaviorLabel observed, const std::string& predicted) {
    if (to_string(observed) == predicted)
        return true;
    if (observed == BehaviorLabel::AlphaTakeoverTotal)
        return predicted == to_string(BehaviorLabel::AlphaTakeoverAE);
    if (observed == BehaviorLabel::BetaTakeoverTotal)
        return predicted == to_string(BehaviorLabel::BetaTakeoverAE);
    return false;
}

std::vector<SweepCell> sweep_phase(const std::vector<std::pair<Rational, Rational>>& tau_grid, const ModelParams& base,
                                   int seeds_per_cell, std::uint64_t master_seed, double epsilon,
                                   const RunOptions& options, int jobs) {
    if (seeds_per_cell < 1)
        throw ParameterError("seeds_per_cell must be positive");
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < seeds_per_cell; ++i)
        seeds.push_back(derive_seed(master_seed, static_cast<std::uint64_t>(i)));

    std::vector<SweepCell> cells;
    cells.reserve(tau_grid.size());
    for (const auto& [ta, tb] : tau_grid) {
        ModelParams p = base;
        p.tau_alpha = ta;
        p.tau_beta = tb;
        SweepCell cell;
        cell.tau_alpha = ta;
        cell.tau_beta = tb;
        cell.stats = run_trials(p, seeds, epsilon, options, jobs);
        cell.label = cell.stats.majority();
        cell.predicted = predicted_label(p.dim, ta.to_double(), tb.to_double());
        cells.push_back(std::move(cell));
    }
    return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
    out << "tau_alpha,tau_beta,label,runs,static_votes,alpha_ae_votes,beta_ae_votes,alpha_total_votes,"
           "beta_total_votes,predicted\n";
    for (const SweepCell& c : cells) {
        const TrialStats& s = c.stats;
        out << format_double(c.tau_alpha.to_double()) << ',' << format_double(c.tau_beta.to_double()) << ','
            << to_string(c.label) << ',' << s.runs << ',' << s.votes(BehaviorLabel::StaticAE) << ','
            << s.votes(BehaviorLabel::AlphaTakeoverAE) << ',' << s.votes(BehaviorLabel::BetaTakeoverAE) << ','
            << s.votes(BehaviorLabel::AlphaTakeoverTotal) << ',' << s.votes(BehaviorLabel::BetaTakeoverTotal) << ','
            << c.predicted << '\n';
    }
}

EventEstimate estimate_event_prob(const EventSpec& spec, int w, int dim, std::uint64_t trials, std::uint64_t seed,
                                  int jobs) {
    spec.validate();
    if (trials < 1)
        throw ParameterError("trials must be positive");
    if (w < 1)
        throw ParameterError("w must be positive");
    if (!event_supports_dim(spec.kind, dim))
        throw ParameterError("event " + std::string(to_string(spec.kind)) + " is not defined in dimension " +
                             std::to_string(dim));
    // Warm the shared family caches before threads start.
    if (spec.kind == EventKind::rn)
        rotated_lower_family(w);
    else if (spec.kind == EventKind::pn || spec.kind == EventKind::pn3d)
        partial_family(w, dim, *spec.gamma, spec.directions);

    const int reach = event_reach(spec.kind, w);
    const int side = 2 * reach + 1;
    const std::size_t cells = static_cast<std::size_t>(side) * side * (dim == 3 ? side : 1);
    constexpr std::uint64_t kBlock = 4096;
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<std::uint64_t> hits(blocks);

    parallel_for(blocks, jobs, [&](std::size_t b) {
        std::mt19937_64 rng(derive_seed(seed, b));
        std::vector<unsigned char> window(cells);
        const std::uint64_t begin = b * kBlock;
        const std::uint64_t end = std::min(trials, begin + kBlock);
        std::uint64_t h = 0;
        for (std::uint64_t t = begin; t < end; ++t) {
            for (std::size_t i = 0; i < cells; i += 64) {
                std::uint64_t bits = rng();
                const std::size_t stop = std::min(cells, i + 64);
                for (std::size_t j = i; j < stop; ++j, bits >>= 1)
                    window[j] = (bits & 1) ? 0 : 1;  // bit 1 is alpha
            }
            auto type_at = [&](int dx, int dy, int dz) {
                const std::size_t k = static_cast<std::size_t>(dx + reach) +
                                      side * (static_cast<std::size_t>(dy + reach) +
                                              side * static_cast<std::size_t>(dim == 3 ? dz + reach : 0));
                return static_cast<NodeType>(window[k]);
            };
            h += event_holds_at(type_at, w, dim, spec);
        }
        hits[b] = h;
    });

    EventEstimate e;
    e.trials = trials;
    for (std::uint64_t h : hits)
        e.hits += h;
    e.estimate = static_cast<double>(e.hits) / static_cast<double>(trials);
    e.ci95 = wilson_interval(e.hits, trials);
    return e;
}

PlantResult plant_and_run(const ModelParams& params, const Region& plant, NodeType type, std::uint64_t seed,
                          const RunOptions& options, int trace_cap) {
    params.validate();
    Configuration initial = random_config(params, seed);
    const std::vector<NodeId> planted = plant.nodes();
    for (NodeId id : planted) {
        if (id >= initial.size())
            throw ParameterError("plant region lies outside the torus");
        initial.set(id, type);
    }
    const Coord centre = plant.centre();
    const int cap = std::max(0, std::min(params.n / 2 - 1, trace_cap));

    PlantResult out;
    out.radius_trace.push_back(largest_monochrome_radius(initial, centre, type, cap));
    auto observer = [&](const Configuration& c, const StageReport&) {
        out.radius_trace.push_back(largest_monochrome_radius(c, centre, type, cap));
        if (out.plant_preserved)
            for (NodeId id : planted)
                if (c[id] != type) {
                    out.plant_preserved = false;
                    break;
                }
    };
    out.run = run(initial, options, seed, observer);
    return out;
}

OracleReport compare_with_reference(const Configuration& initial, std::uint64_t max_stages) {
    std::vector<Configuration> fast_states, slow_states;
    RunOptions options;
    options.max_stages = max_stages;
    const RunResult fast = run(initial, options, 0, [&](const Configuration& c, const StageReport&) {
        fast_states.push_back(c);
    });
    const RunResult slow = naive_reference_run(initial, max_stages, 0, [&](const Configuration& c, const StageReport&) {
        slow_states.push_back(c);
    });
    OracleReport r;
    const std::size_t common = std::min(fast_states.size(), slow_states.size());
    r.stages = common;
    for (std::size_t s = 0; s < common; ++s)
        if (!(fast_states[s] == slow_states[s]) || fast.reports[s] != slow.reports[s]) {
            r.agree = false;
            r.first_mismatch_stage = static_cast<std::int64_t>(s) + 1;
            return r;
        }
    if (fast_states.size() != slow_states.size() || fast.terminated != slow.terminated) {
        r.agree = false;
        r.first_mismatch_stage = static_cast<std::int64_t>(common) + 1;
    }
    return r;
}

const std::vector<std::pair<Rational, Rational>>& oracle_tau_pairs() {
    static const std::vector<std::pair<Rational, Rational>> pairs = [] {
        const char* raw[][2] = {
            {"0.2", "0.1"},    // static, low
            {"0.45", "0.3"},   // beta AE
            {"0.3", "0.45"},   // alpha AE
            {"0.6", "0.4"},    // beta total
            {"0.4", "0.6"},    // alpha total
            {"0.55", "0.7"},   // alpha AE, high
            {"0.7", "0.55"},   // beta AE, high
            {"0.8", "0.9"},    // static, high
            {"0.44", "0.43"},  // grey
            {"0.5", "0.5"},    // grey
        };
        std::vector<std::pair<Rational, Rational>> out;
        for (const auto& p : raw)
            out.emplace_back(Rational::parse(p[0]), Rational::parse(p[1]));
        return out;
    }();
    return pairs;
}

OracleInstance oracle_instance(int n, std::uint64_t master_seed, std::uint64_t i) {
    const auto& pairs = oracle_tau_pairs();
    OracleInstance inst;
    inst.params.dim = 2;
    inst.params.n = n;
    inst.params.w = 1 + static_cast<int>((i / pairs.size()) % 3);
    inst.params.tau_alpha = pairs[i % pairs.size()].first;
    inst.params.tau_beta = pairs[i % pairs.size()].second;
    inst.seed = derive_seed(master_seed, i);
    return inst;
}

}  // namespace schelling
