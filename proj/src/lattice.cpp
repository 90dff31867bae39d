#include "schelling/lattice.hpp"

#include <algorithm>
#include <random>

namespace schelling {

const char* to_string(NodeType t) { return t == NodeType::Alpha ? "alpha" : "beta"; }

void ModelParams::validate_storage() const {
    if (dim != 2 && dim != 3)
        throw ParameterError("dim must be 2 or 3, got " + std::to_string(dim));
    if (w < 1)
        throw ParameterError("w must be positive, got " + std::to_string(w));
    if (n < 2 * w + 1)
        throw ParameterError("n must be at least 2w+1 = " + std::to_string(2 * w + 1) + ", got " + std::to_string(n));
    const Rational zero(0, 1), one(1, 1);
    if (tau_alpha < zero || tau_alpha > one)
        throw ParameterError("tau_alpha outside [0,1]: " + tau_alpha.to_string());
    if (tau_beta < zero || tau_beta > one)
        throw ParameterError("tau_beta outside [0,1]: " + tau_beta.to_string());
}

void ModelParams::validate() const {
    validate_storage();
    if (n <= 2 * (2 * w + 1))
        throw ParameterError("n must exceed 2(2w+1) = " + std::to_string(2 * (2 * w + 1)) + ", got " +
                             std::to_string(n));
}

std::size_t ModelParams::node_count() const {
    std::size_t total = 1;
    for (int i = 0; i < dim; ++i)
        total *= static_cast<std::size_t>(n);
    return total;
}

std::int64_t neighborhood_size(const ModelParams& params) {
    std::int64_t side = 2 * params.w + 1;
    std::int64_t total = 1;
    for (int i = 0; i < params.dim; ++i)
        total *= side;
    return total;
}

int torus_delta(int a, int b, int n) {
    int d = (b - a) % n;
    if (d < 0)
        d += n;
    if (2 * d > n)
        d -= n;
    return d;
}

Configuration::Configuration(ModelParams params, NodeType fill) : params_(std::move(params)) {
    params_.validate_storage();
    cells_.assign(params_.node_count(), fill);
}

namespace {
inline int wrap(int v, int n) {
    v %= n;
    return v < 0 ? v + n : v;
}
}  // namespace

NodeId Configuration::index(Coord c) const {
    const auto n = static_cast<NodeId>(params_.n);
    NodeId id = static_cast<NodeId>(wrap(c.x, params_.n)) + n * static_cast<NodeId>(wrap(c.y, params_.n));
    if (params_.dim == 3)
        id += n * n * static_cast<NodeId>(wrap(c.z, params_.n));
    return id;
}

Coord Configuration::coord(NodeId id) const {
    const auto n = static_cast<NodeId>(params_.n);
    Coord c;
    c.x = static_cast<int>(id % n);
    c.y = static_cast<int>((id / n) % n);
    c.z = params_.dim == 3 ? static_cast<int>(id / (n * n)) : 0;
    return c;
}

NodeId Configuration::shifted(NodeId id, int dx, int dy, int dz) const {
    Coord c = coord(id);
    return index({c.x + dx, c.y + dy, c.z + dz});
}

std::size_t Configuration::count(NodeType t) const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), t));
}

Configuration random_config(const ModelParams& params, std::uint64_t seed) {
    params.validate();
    Configuration config(params);
    std::mt19937_64 rng(seed);
    const std::size_t total = config.size();
    for (std::size_t base = 0; base < total; base += 64) {
        std::uint64_t bits = rng();
        const std::size_t end = std::min(total, base + 64);
        for (std::size_t i = base; i < end; ++i, bits >>= 1)
            config.set(i, (bits & 1u) ? NodeType::Alpha : NodeType::Beta);
    }
    config.stage = 0;
    return config;
}

namespace {

// In-place circular window sum of radius w along one axis. `stride` is the
// distance between consecutive elements on the axis; `lines` enumerates the
// starting offsets of every line parallel to it.
void circular_window_sum(std::vector<std::int32_t>& data, int n, int w, std::size_t stride,
                         const std::vector<std::size_t>& lines) {
    std::vector<std::int32_t> prefix(static_cast<std::size_t>(n) + 1);
    std::vector<std::int32_t> line(static_cast<std::size_t>(n));
    for (std::size_t start : lines) {
        prefix[0] = 0;
        for (int i = 0; i < n; ++i) {
            line[i] = data[start + static_cast<std::size_t>(i) * stride];
            prefix[i + 1] = prefix[i] + line[i];
        }
        const std::int32_t period = prefix[n];
        for (int i = 0; i < n; ++i) {
            // Sum over [i-w, i+w] modulo n; the window never exceeds one period.
            const int lo = i - w;
            const int hi = i + w + 1;
            std::int32_t s = 0;
            if (lo < 0)
                s = prefix[hi] + (period - prefix[lo + n]);
            else if (hi > n)
                s = (period - prefix[lo]) + prefix[hi - n];
            else
                s = prefix[hi] - prefix[lo];
            data[start + static_cast<std::size_t>(i) * stride] = s;
        }
    }
}

}  // namespace

NeighborCounts build_counts(const Configuration& config) {
    const int n = config.n();
    const int w = config.params().w;
    const auto un = static_cast<std::size_t>(n);
    NeighborCounts counts;
    counts.alpha_in_nbhd.resize(config.size());
    for (NodeId i = 0; i < config.size(); ++i)
        counts.alpha_in_nbhd[i] = config[i] == NodeType::Alpha ? 1 : 0;

    std::vector<std::size_t> lines;
    const std::size_t planes = config.dim() == 3 ? un : 1;
    // x axis: lines start at every (y, z).
    lines.clear();
    for (std::size_t z = 0; z < planes; ++z)
        for (std::size_t y = 0; y < un; ++y)
            lines.push_back((z * un + y) * un);
    circular_window_sum(counts.alpha_in_nbhd, n, w, 1, lines);
    // y axis: lines start at every (x, z).
    lines.clear();
    for (std::size_t z = 0; z < planes; ++z)
        for (std::size_t x = 0; x < un; ++x)
            lines.push_back(z * un * un + x);
    circular_window_sum(counts.alpha_in_nbhd, n, w, un, lines);
    if (config.dim() == 3) {
        lines.clear();
        for (std::size_t i = 0; i < un * un; ++i)
            lines.push_back(i);
        circular_window_sum(counts.alpha_in_nbhd, n, w, un * un, lines);
    }
    return counts;
}

void apply_flip(Configuration& config, NeighborCounts& counts, NodeId u) {
    const std::int32_t delta = config[u] == NodeType::Alpha ? -1 : 1;
    config.negate(u);
    const int n = config.n();
    const int w = config.params().w;
    const auto un = static_cast<std::size_t>(n);
    const Coord c = config.coord(u);
    const int zlo = config.dim() == 3 ? -w : 0;
    const int zhi = config.dim() == 3 ? w : 0;
    for (int dz = zlo; dz <= zhi; ++dz) {
        const std::size_t zbase = config.dim() == 3 ? static_cast<std::size_t>(wrap(c.z + dz, n)) * un * un : 0;
        for (int dy = -w; dy <= w; ++dy) {
            const std::size_t row = zbase + static_cast<std::size_t>(wrap(c.y + dy, n)) * un;
            for (int dx = -w; dx <= w; ++dx)
                counts.alpha_in_nbhd[row + static_cast<std::size_t>(wrap(c.x + dx, n))] += delta;
        }
    }
}

std::int32_t same_type_count(const Configuration& config, const NeighborCounts& counts, NodeId u) {
    const auto total = static_cast<std::int32_t>(neighborhood_size(config.params()));
    return config[u] == NodeType::Alpha ? counts[u] : total - counts[u];
}

}  // namespace schelling
