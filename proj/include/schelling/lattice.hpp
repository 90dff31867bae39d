// lattice.hpp
// Torus geometry, configuration storage and neighbourhood alpha counts for the
// 2D and 3D models.
//
// Nodes are stored row-major: id = x + n * (y + n * z). Lexicographic node
// order is therefore increasing id, i.e. ordered by (z, y, x).
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "schelling/rational.hpp"

namespace schelling {

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class NodeType : std::uint8_t { Alpha = 0, Beta = 1 };

constexpr NodeType opposite(NodeType t) { return t == NodeType::Alpha ? NodeType::Beta : NodeType::Alpha; }
const char* to_string(NodeType t);

using NodeId = std::size_t;

struct Coord {
    int x = 0;
    int y = 0;
    int z = 0;
    friend bool operator==(const Coord&, const Coord&) = default;
};

struct ModelParams {
    int dim = 2;
    int n = 0;
    int w = 1;
    Rational tau_alpha;
    Rational tau_beta;

    // Throws ParameterError unless dim in {2,3}, w >= 1, n > 2(2w+1) and both
    // intolerances lie in [0,1].
    void validate() const;
    // Weaker check used for hand-built configurations: only requires that a
    // window fits on the torus once (n >= 2w+1).
    void validate_storage() const;

    std::size_t node_count() const;
    const Rational& tau(NodeType t) const { return t == NodeType::Alpha ? tau_alpha : tau_beta; }
};

// (2w+1)^dim
std::int64_t neighborhood_size(const ModelParams& params);

// Minimal signed displacement from a to b on a cycle of length n, in (-n/2, n/2].
int torus_delta(int a, int b, int n);

class Configuration {
public:
    Configuration() = default;
    // Accepts any params passing validate_storage(); simulation entry points
    // apply the full validate().
    explicit Configuration(ModelParams params, NodeType fill = NodeType::Beta);

    const ModelParams& params() const { return params_; }
    std::size_t size() const { return cells_.size(); }
    int n() const { return params_.n; }
    int dim() const { return params_.dim; }

    NodeType operator[](NodeId id) const { return cells_[id]; }
    void set(NodeId id, NodeType t) { cells_[id] = t; }
    void negate(NodeId id) { cells_[id] = opposite(cells_[id]); }
    std::span<const NodeType> cells() const { return cells_; }

    // Coordinates are reduced modulo n.
    NodeId index(Coord c) const;
    Coord coord(NodeId id) const;
    NodeId shifted(NodeId id, int dx, int dy, int dz = 0) const;

    std::size_t count(NodeType t) const;

    std::uint64_t stage = 0;

    friend bool operator==(const Configuration& a, const Configuration& b) {
        return a.cells_ == b.cells_;
    }

private:
    ModelParams params_;
    std::vector<NodeType> cells_;
};

inline constexpr const char* kRngName = "mt19937_64";

// Each cell is alpha with probability 1/2. Bits come from std::mt19937_64
// seeded with `seed`, 64 cells per draw, least significant bit first
// (bit = 1 means alpha).
Configuration random_config(const ModelParams& params, std::uint64_t seed);

struct NeighborCounts {
    std::vector<std::int32_t> alpha_in_nbhd;

    std::int32_t operator[](NodeId id) const { return alpha_in_nbhd[id]; }
    friend bool operator==(const NeighborCounts&, const NeighborCounts&) = default;
};

// Exact alpha counts over every (2w+1)^dim window, by circular prefix sums
// applied one axis at a time.
NeighborCounts build_counts(const Configuration& config);

// Negates node u and adjusts the counts of the (2w+1)^dim nodes whose
// neighbourhood contains u.
void apply_flip(Configuration& config, NeighborCounts& counts, NodeId u);

// Number of nodes of u's own type in N(u), u included.
std::int32_t same_type_count(const Configuration& config, const NeighborCounts& counts, NodeId u);

}  // namespace schelling
