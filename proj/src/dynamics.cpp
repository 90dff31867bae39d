#include "schelling/dynamics.hpp"

#include <algorithm>

#include "schelling/rng.hpp"

namespace schelling {

std::uint64_t default_max_stages(const ModelParams& params) { return 4ull * static_cast<std::uint64_t>(params.n); }

namespace {

// Happiness of a node of type t whose neighbourhood holds `alpha` alpha nodes.
bool happy_as(NodeType t, std::int64_t alpha, std::int64_t total, const ModelParams& p) {
    const std::int64_t own = t == NodeType::Alpha ? alpha : total - alpha;
    return p.tau(t).count_at_least(own, total);
}

}  // namespace

bool is_happy(const NeighborCounts& counts, const Configuration& config, NodeId u) {
    const auto& p = config.params();
    return happy_as(config[u], counts[u], neighborhood_size(p), p);
}

bool is_hopeful(const NeighborCounts& counts, const Configuration& config, NodeId u) {
    const auto& p = config.params();
    const std::int64_t total = neighborhood_size(p);
    const NodeType t = config[u];
    const std::int64_t alpha = counts[u];
    if (happy_as(t, alpha, total, p))
        return false;
    const std::int64_t alpha_after = t == NodeType::Alpha ? alpha - 1 : alpha + 1;
    return happy_as(opposite(t), alpha_after, total, p);
}

std::int64_t lyapunov(const Configuration& config, const NeighborCounts& counts) {
    std::int64_t sum = 0;
    for (NodeId u = 0; u < config.size(); ++u)
        sum += same_type_count(config, counts, u);
    return sum;
}

std::int64_t lyapunov(const Configuration& config) { return lyapunov(config, build_counts(config)); }

std::vector<NodeId> hopeful_nodes(const Configuration& config, const NeighborCounts& counts) {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < config.size(); ++u)
        if (is_hopeful(counts, config, u))
            out.push_back(u);
    return out;
}

StagedProcess::StagedProcess(Configuration initial, RunOptions options)
    : config_(std::move(initial)), options_(options) {
    config_.params().validate();
    counts_ = build_counts(config_);
    hopeful_ = hopeful_nodes(config_, counts_);
    mark_.assign(config_.size(), 0);
}

void StagedProcess::order_for_stage(std::vector<NodeId>& nodes) const {
    if (options_.order == NodeOrder::Lexicographic)
        return;  // hopeful_ is kept sorted by id
    const std::uint64_t key_seed = derive_seed(options_.order_seed, config_.stage + 1);
    std::vector<std::pair<std::uint64_t, NodeId>> keyed;
    keyed.reserve(nodes.size());
    for (NodeId u : nodes)
        keyed.emplace_back(splitmix64(key_seed ^ static_cast<std::uint64_t>(u)), u);
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        nodes[i] = keyed[i].second;
}

StageReport StagedProcess::run_stage() {
    std::vector<NodeId> order = hopeful_;
    order_for_stage(order);

    std::vector<NodeId> flipped;
    for (NodeId u : order) {
        if (is_hopeful(counts_, config_, u)) {
            apply_flip(config_, counts_, u);
            flipped.push_back(u);
        }
    }
    ++config_.stage;

    // Hopefulness depends only on a node's type and count, so only the
    // previously hopeful nodes and the neighbourhoods of flips can change.
    ++epoch_;
    std::vector<NodeId> candidates;
    auto consider = [&](NodeId v) {
        if (mark_[v] != epoch_) {
            mark_[v] = epoch_;
            candidates.push_back(v);
        }
    };
    for (NodeId u : hopeful_)
        consider(u);
    const int w = config_.params().w;
    const bool three = config_.dim() == 3;
    for (NodeId u : flipped) {
        for (int dz = three ? -w : 0; dz <= (three ? w : 0); ++dz)
            for (int dy = -w; dy <= w; ++dy)
                for (int dx = -w; dx <= w; ++dx)
                    consider(config_.shifted(u, dx, dy, dz));
    }
    std::sort(candidates.begin(), candidates.end());
    hopeful_.clear();
    for (NodeId v : candidates)
        if (is_hopeful(counts_, config_, v))
            hopeful_.push_back(v);

    StageReport report;
    report.stage = config_.stage;
    report.flips = flipped.size();
    report.alpha_count = config_.count(NodeType::Alpha);
    report.lyapunov = lyapunov(config_, counts_);
    return report;
}

RunResult run(const Configuration& initial, const RunOptions& options, std::uint64_t seed,
              const StageObserver& observer) {
    const std::uint64_t max_stages = options.max_stages == 0 ? default_max_stages(initial.params()) : options.max_stages;
    StagedProcess process(initial, options);
    RunResult result;
    result.seed = seed;
    while (true) {
        StageReport report = process.run_stage();
        result.reports.push_back(report);
        if (observer)
            observer(process.config(), report);
        if (report.flips == 0 || result.reports.size() >= max_stages)
            break;
    }
    result.terminated = result.reports.back().flips == 0;
    result.final = process.config();
    return result;
}

RunResult run(const ModelParams& params, std::uint64_t seed, const RunOptions& options,
              const StageObserver& observer) {
    return run(random_config(params, seed), options, seed, observer);
}

}  // namespace schelling
