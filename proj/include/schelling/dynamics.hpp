// dynamics.hpp
// The staged unperturbed process. At stage s+1 the nodes that were hopeful at
// the end of stage s are visited in turn, and each is flipped if it is still
// hopeful given the flips already made during the stage. The process ends at
// the first stage with no hopeful nodes.
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "schelling/lattice.hpp"

namespace schelling {

enum class NodeOrder {
    Lexicographic,  // increasing node id
    SeededRandom,   // per-stage pseudo-random permutation keyed by (order_seed, stage)
};

struct StageReport {
    std::uint64_t stage = 0;
    std::uint64_t flips = 0;
    std::uint64_t alpha_count = 0;
    std::int64_t lyapunov = 0;
    friend bool operator==(const StageReport&, const StageReport&) = default;
};

struct RunResult {
    Configuration final;
    std::vector<StageReport> reports;
    bool terminated = false;
    std::uint64_t seed = 0;
};

struct RunOptions {
    // 0 selects the default of 4n stages.
    std::uint64_t max_stages = 0;
    NodeOrder order = NodeOrder::Lexicographic;
    std::uint64_t order_seed = 0;
};

std::uint64_t default_max_stages(const ModelParams& params);

// Called after every stage with the configuration at the end of that stage.
using StageObserver = std::function<void(const Configuration&, const StageReport&)>;

// Own-type proportion in N(u) is at least the node's intolerance.
bool is_happy(const NeighborCounts& counts, const Configuration& config, NodeId u);
// Unhappy now, happy after switching type (u's own contribution recounted).
bool is_hopeful(const NeighborCounts& counts, const Configuration& config, NodeId u);

// Sum over nodes of the number of same-type nodes in N(u), u included.
std::int64_t lyapunov(const Configuration& config);
std::int64_t lyapunov(const Configuration& config, const NeighborCounts& counts);

// All hopeful nodes, in increasing id order.
std::vector<NodeId> hopeful_nodes(const Configuration& config, const NeighborCounts& counts);

// Incremental engine: config, counts and the current hopeful set travel
// together. Single writer.
class StagedProcess {
public:
    explicit StagedProcess(Configuration initial, RunOptions options = {});

    const Configuration& config() const { return config_; }
    const NeighborCounts& counts() const { return counts_; }
    // Hopeful set at the end of the last completed stage, increasing id order.
    const std::vector<NodeId>& hopeful() const { return hopeful_; }
    bool finished() const { return hopeful_.empty(); }

    // Runs one stage. The report has flips == 0 exactly when the hopeful set
    // was already empty.
    StageReport run_stage();

private:
    void order_for_stage(std::vector<NodeId>& nodes) const;

    Configuration config_;
    NeighborCounts counts_;
    RunOptions options_;
    std::vector<NodeId> hopeful_;
    std::vector<std::uint64_t> mark_;
    std::uint64_t epoch_ = 0;
};

RunResult run(const Configuration& initial, const RunOptions& options = {}, std::uint64_t seed = 0,
              const StageObserver& observer = {});
RunResult run(const ModelParams& params, std::uint64_t seed, const RunOptions& options = {},
              const StageObserver& observer = {});

// Reference engine that recounts every neighbourhood from scratch at every
// query and rescans the whole torus after each stage. Lexicographic order
// only. Intended for n up to about 50.
RunResult naive_reference_run(const Configuration& initial, std::uint64_t max_stages, std::uint64_t seed = 0,
                              const StageObserver& observer = {});

}  // namespace schelling
