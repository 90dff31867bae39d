// Reference engine. Shares nothing with the incremental engine beyond the
// data types: every neighbourhood is recounted by direct enumeration.
#include "schelling/dynamics.hpp"

namespace schelling {

namespace {

int mod(int v, int n) {
    v %= n;
    return v < 0 ? v + n : v;
}

std::int64_t window_size(const ModelParams& p) {
    std::int64_t s = 1;
    for (int i = 0; i < p.dim; ++i)
        s *= 2 * p.w + 1;
    return s;
}

std::int64_t count_type(const Configuration& c, NodeId u, NodeType t) {
    const int n = c.n();
    const int w = c.params().w;
    const int x = static_cast<int>(u % n);
    const int y = static_cast<int>((u / n) % n);
    const int z = c.dim() == 3 ? static_cast<int>(u / (static_cast<NodeId>(n) * n)) : 0;
    const int zr = c.dim() == 3 ? w : 0;
    std::int64_t total = 0;
    for (int k = z - zr; k <= z + zr; ++k)
        for (int j = y - w; j <= y + w; ++j)
            for (int i = x - w; i <= x + w; ++i) {
                NodeId v = static_cast<NodeId>(mod(i, n)) + static_cast<NodeId>(n) * static_cast<NodeId>(mod(j, n)) +
                           static_cast<NodeId>(n) * n * static_cast<NodeId>(mod(k, n));
                if (c[v] == t)
                    ++total;
            }
    return total;
}

bool naive_happy(const Configuration& c, NodeId u) {
    const NodeType t = c[u];
    return c.params().tau(t).count_at_least(count_type(c, u, t), window_size(c.params()));
}

bool naive_hopeful(Configuration& c, NodeId u) {
    if (naive_happy(c, u))
        return false;
    c.negate(u);
    const bool ok = naive_happy(c, u);
    c.negate(u);
    return ok;
}

std::int64_t naive_lyapunov(const Configuration& c) {
    std::int64_t sum = 0;
    for (NodeId u = 0; u < c.size(); ++u)
        sum += count_type(c, u, c[u]);
    return sum;
}

}  // namespace

RunResult naive_reference_run(const Configuration& initial, std::uint64_t max_stages, std::uint64_t seed,
                              const StageObserver& observer) {
    initial.params().validate();
    if (max_stages == 0)
        max_stages = default_max_stages(initial.params());
    Configuration c = initial;
    std::vector<NodeId> hopeful;
    for (NodeId u = 0; u < c.size(); ++u)
        if (naive_hopeful(c, u))
            hopeful.push_back(u);

    RunResult result;
    result.seed = seed;
    while (true) {
        std::uint64_t flips = 0;
        for (NodeId u : hopeful) {
            if (naive_hopeful(c, u)) {
                c.negate(u);
                ++flips;
            }
        }
        ++c.stage;
        hopeful.clear();
        for (NodeId u = 0; u < c.size(); ++u)
            if (naive_hopeful(c, u))
                hopeful.push_back(u);

        StageReport report{c.stage, flips, c.count(NodeType::Alpha), naive_lyapunov(c)};
        result.reports.push_back(report);
        if (observer)
            observer(c, report);
        if (flips == 0 || result.reports.size() >= max_stages)
            break;
    }
    result.terminated = result.reports.back().flips == 0;
    result.final = c;
    return result;
}

}  // namespace schelling
