#include "schelling/structures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>

namespace schelling {

namespace {

int wrap(int v, int n) {
    v %= n;
    return v < 0 ? v + n : v;
}

// Largest integer whose square is <= v (v >= 0).
std::int64_t isqrt(std::int64_t v) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r * r > v)
        --r;
    while ((r + 1) * (r + 1) <= v)
        ++r;
    return r;
}

// dist^2 <= radius^2 with radius = p/q, i.e. dist^2 q^2 <= p^2.
bool within(std::int64_t dist2, const Rational& radius) {
    const auto q = static_cast<__int128>(radius.den());
    const auto p = static_cast<__int128>(radius.num());
    return static_cast<__int128>(dist2) * q * q <= p * p;
}

Coord coord_on(const ModelParams& p, NodeId id) {
    const auto n = static_cast<NodeId>(p.n);
    return {static_cast<int>(id % n), static_cast<int>((id / n) % n), p.dim == 3 ? static_cast<int>(id / (n * n)) : 0};
}

NodeId index_on(const ModelParams& p, Coord c) {
    const auto n = static_cast<NodeId>(p.n);
    return static_cast<NodeId>(wrap(c.x, p.n)) +
           n * (static_cast<NodeId>(wrap(c.y, p.n)) + n * static_cast<NodeId>(p.dim == 3 ? wrap(c.z, p.n) : 0));
}

int floor_of(const Rational& r) {
    std::int64_t f = r.num() / r.den();
    if (f * r.den() > r.num())
        --f;
    return static_cast<int>(f);
}

void require_disc_radius(const ModelParams& params, const Rational& radius, int margin) {
    if (radius < Rational(0, 1))
        throw ParameterError("disc radius must be non-negative");
    // radius < n/4 - margin
    if (!(radius + Rational(margin, 1) < Rational(params.n, 4)))
        throw ParameterError("disc radius " + radius.to_string() + " too large for n = " + std::to_string(params.n));
}

}  // namespace

// ---------------------------------------------------------------- Region

Region Region::list(const ModelParams& params, std::vector<NodeId> nodes) {
    params.validate_storage();
    Region r;
    r.shape_ = Shape::List;
    r.n_ = params.n;
    r.dim_ = params.dim;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (!nodes.empty() && nodes.back() >= params.node_count())
        throw ParameterError("region node id out of range");
    r.list_ = std::move(nodes);
    return r;
}

Region Region::box(const ModelParams& params, Coord lo, Coord extent) {
    params.validate_storage();
    if (params.dim == 2) {
        lo.z = 0;
        extent.z = 1;
    }
    for (int e : {extent.x, extent.y, extent.z})
        if (e < 1 || e > params.n)
            throw ParameterError("box extent must lie in [1, n]");
    Region r;
    r.shape_ = Shape::Box;
    r.n_ = params.n;
    r.dim_ = params.dim;
    r.lo_ = {wrap(lo.x, params.n), wrap(lo.y, params.n), wrap(lo.z, params.n)};
    r.extent_ = extent;
    return r;
}

Region Region::disc(const ModelParams& params, Coord centre, Rational radius) {
    params.validate_storage();
    require_disc_radius(params, radius, 0);
    Region r;
    r.shape_ = Shape::Disc;
    r.n_ = params.n;
    r.dim_ = params.dim;
    if (params.dim == 2)
        centre.z = 0;
    r.lo_ = {wrap(centre.x, params.n), wrap(centre.y, params.n), wrap(centre.z, params.n)};
    r.radius_ = radius;
    return r;
}

bool Region::contains(Coord c) const {
    c = {wrap(c.x, n_), wrap(c.y, n_), dim_ == 3 ? wrap(c.z, n_) : 0};
    switch (shape_) {
    case Shape::List: {
        const auto un = static_cast<NodeId>(n_);
        const NodeId id = static_cast<NodeId>(c.x) + un * (static_cast<NodeId>(c.y) + un * static_cast<NodeId>(c.z));
        return std::binary_search(list_.begin(), list_.end(), id);
    }
    case Shape::Box:
        return wrap(c.x - lo_.x, n_) < extent_.x && wrap(c.y - lo_.y, n_) < extent_.y &&
               wrap(c.z - lo_.z, n_) < extent_.z;
    case Shape::Disc: {
        const std::int64_t dx = torus_delta(lo_.x, c.x, n_);
        const std::int64_t dy = torus_delta(lo_.y, c.y, n_);
        const std::int64_t dz = dim_ == 3 ? torus_delta(lo_.z, c.z, n_) : 0;
        return within(dx * dx + dy * dy + dz * dz, radius_);
    }
    }
    return false;
}

bool Region::contains(NodeId id) const {
    if (shape_ == Shape::List)
        return std::binary_search(list_.begin(), list_.end(), id);
    const auto un = static_cast<NodeId>(n_);
    return contains(Coord{static_cast<int>(id % un), static_cast<int>((id / un) % un),
                          dim_ == 3 ? static_cast<int>(id / (un * un)) : 0});
}

std::vector<NodeId> Region::nodes() const {
    if (shape_ == Shape::List)
        return list_;
    const auto un = static_cast<NodeId>(n_);
    auto id_of = [&](int x, int y, int z) {
        return static_cast<NodeId>(wrap(x, n_)) +
               un * (static_cast<NodeId>(wrap(y, n_)) + un * static_cast<NodeId>(wrap(z, n_)));
    };
    std::vector<NodeId> out;
    if (shape_ == Shape::Box) {
        out.reserve(static_cast<std::size_t>(extent_.x) * extent_.y * extent_.z);
        for (int k = 0; k < extent_.z; ++k)
            for (int j = 0; j < extent_.y; ++j)
                for (int i = 0; i < extent_.x; ++i)
                    out.push_back(id_of(lo_.x + i, lo_.y + j, lo_.z + k));
    } else {
        const int R = floor_of(radius_);
        const int zr = dim_ == 3 ? R : 0;
        for (int dz = -zr; dz <= zr; ++dz)
            for (int dy = -R; dy <= R; ++dy)
                for (int dx = -R; dx <= R; ++dx)
                    if (within(static_cast<std::int64_t>(dx) * dx + static_cast<std::int64_t>(dy) * dy +
                                   static_cast<std::int64_t>(dz) * dz,
                               radius_))
                        out.push_back(id_of(lo_.x + dx, lo_.y + dy, lo_.z + dz));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Region::size() const {
    switch (shape_) {
    case Shape::List:
        return list_.size();
    case Shape::Box:
        return static_cast<std::size_t>(extent_.x) * extent_.y * extent_.z;
    case Shape::Disc:
        return nodes().size();
    }
    return 0;
}

// ---------------------------------------------------------------- structures

bool is_stable(const Configuration& config, const Region& region, NodeType t) {
    const auto members = region.nodes();
    if (members.empty())
        throw ParameterError("stability of an empty region");
    std::vector<unsigned char> in(config.size(), 0);
    for (NodeId u : members)
        in[u] = 1;
    const int w = config.params().w;
    const int zr = config.dim() == 3 ? w : 0;
    const std::int64_t total = neighborhood_size(config.params());
    const Rational& tau = config.params().tau(t);
    for (NodeId u : members) {
        std::int64_t c = 0;
        for (int dz = -zr; dz <= zr; ++dz)
            for (int dy = -w; dy <= w; ++dy)
                for (int dx = -w; dx <= w; ++dx) {
                    const NodeId v = config.shifted(u, dx, dy, dz);
                    c += in[v] && config[v] == t;
                }
        if (!tau.count_at_least(c, total))
            return false;
    }
    return true;
}

bool is_firewall(const Configuration& config, Coord centre, Rational radius, NodeType t) {
    const Region disc = Region::disc(config.params(), centre, radius);
    for (NodeId u : disc.nodes())
        if (config[u] != t)
            return false;
    return true;
}

std::vector<NodeId> outer_boundary(const ModelParams& params, Coord centre, Rational radius) {
    if (params.dim != 2)
        throw ParameterError("outer_boundary is defined in 2D");
    require_disc_radius(params, radius, 1);
    const int R = floor_of(radius) + 1;
    auto inside = [&](int dx, int dy) {
        return within(static_cast<std::int64_t>(dx) * dx + static_cast<std::int64_t>(dy) * dy, radius);
    };
    std::vector<NodeId> out;
    for (int dy = -R; dy <= R; ++dy)
        for (int dx = -R; dx <= R; ++dx) {
            if (inside(dx, dy))
                continue;
            bool touches = false;
            for (int ey = -1; ey <= 1 && !touches; ++ey)
                for (int ex = -1; ex <= 1 && !touches; ++ex)
                    touches = (ex != 0 || ey != 0) && inside(dx + ex, dy + ey);
            if (touches)
                out.push_back(index_on(params, {centre.x + dx, centre.y + dy}));
        }
    std::sort(out.begin(), out.end());
    return out;
}

int largest_monochrome_radius(const Configuration& config, Coord centre, NodeType t, int max_radius) {
    if (config[config.index(centre)] != t)
        return -1;
    // The answer is the largest R with R^2 below the squared distance of the
    // nearest node of the other type.
    std::int64_t nearest = std::numeric_limits<std::int64_t>::max();
    const int zr = config.dim() == 3 ? max_radius : 0;
    for (int dz = -zr; dz <= zr; ++dz)
        for (int dy = -max_radius; dy <= max_radius; ++dy)
            for (int dx = -max_radius; dx <= max_radius; ++dx) {
                const std::int64_t d2 = static_cast<std::int64_t>(dx) * dx + static_cast<std::int64_t>(dy) * dy +
                                        static_cast<std::int64_t>(dz) * dz;
                if (d2 < nearest && config[config.index({centre.x + dx, centre.y + dy, centre.z + dz})] != t)
                    nearest = d2;
            }
    if (nearest > static_cast<std::int64_t>(max_radius) * max_radius)
        return max_radius;
    std::int64_t R = isqrt(nearest);
    if (R * R == nearest)
        --R;
    return static_cast<int>(R);
}

// ---------------------------------------------------------------- measures

namespace {

// Volume of {y in [0, L]^k : sum c_i y_i <= s} for strictly positive c.
double simplex_box_volume(const std::vector<double>& c, double L, double s) {
    const std::size_t k = c.size();
    if (k == 0)
        return s >= 0 ? 1.0 : 0.0;
    double denom = 1.0;
    for (std::size_t i = 0; i < k; ++i)
        denom *= c[i] * static_cast<double>(i + 1);
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        double shift = 0.0;
        int bits = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (mask >> i & 1u) {
                shift += c[i] * L;
                ++bits;
            }
        const double x = s - shift;
        if (x > 0)
            total += (bits % 2 ? -1.0 : 1.0) * std::pow(x, static_cast<double>(k));
    }
    return std::clamp(total / denom, 0.0, std::pow(L, static_cast<double>(k)));
}

}  // namespace

double half_space_measure(int w, int dim, const double* normal, double t) {
    const double L = 2.0 * w;
    std::vector<double> c;
    double spread = 0.0;
    int flat = 0;
    for (int i = 0; i < dim; ++i) {
        const double m = std::abs(normal[i]);
        if (m < 1e-9) {
            ++flat;
            continue;
        }
        c.push_back(m);
        spread += m * w;
    }
    const double full = std::pow(L, dim);
    if (c.empty())
        return t <= 0 ? full : 0.0;
    const double below = std::pow(L, flat) * simplex_box_volume(c, L, t + spread);
    return std::clamp(full - below, 0.0, full);
}

// ---------------------------------------------------------------- families

namespace {

std::vector<Offset> window_offsets(int w, int dim) {
    std::vector<Offset> out;
    const int zr = dim == 3 ? w : 0;
    for (int dz = -zr; dz <= zr; ++dz)
        for (int dy = -w; dy <= w; ++dy)
            for (int dx = -w; dx <= w; ++dx)
                out.push_back({dx, dy, dz});
    return out;
}

bool offset_less(const Offset& a, const Offset& b) {
    return std::tie(a.dz, a.dy, a.dx) < std::tie(b.dz, b.dy, b.dx);
}

void normalise_family(std::vector<std::vector<Offset>>& family) {
    for (auto& set : family)
        std::sort(set.begin(), set.end(), offset_less);
    auto set_less = [](const std::vector<Offset>& a, const std::vector<Offset>& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), offset_less);
    };
    std::sort(family.begin(), family.end(), set_less);
    family.erase(std::unique(family.begin(), family.end()), family.end());
}

std::vector<std::vector<Offset>> build_rotated_lower(int w) {
    const auto all = window_offsets(w, 2);
    std::vector<std::pair<int, int>> dirs;
    for (const Offset& v : all) {
        if (v.dx == 0 && v.dy == 0)
            continue;
        const int g = std::gcd(std::abs(v.dx), std::abs(v.dy));
        dirs.emplace_back(v.dx / g, v.dy / g);
    }
    std::sort(dirs.begin(), dirs.end());
    dirs.erase(std::unique(dirs.begin(), dirs.end()), dirs.end());

    std::vector<std::vector<Offset>> family;
    for (const auto& [ex, ey] : dirs) {
        std::vector<Offset> ahead, behind;
        for (const Offset& v : all) {
            const int cross = ex * v.dy - ey * v.dx;
            const int dot = ex * v.dx + ey * v.dy;
            const bool origin = v.dx == 0 && v.dy == 0;
            if (origin || cross > 0 || (cross == 0 && dot >= 0))
                ahead.push_back(v);
            if (origin || cross > 0 || (cross == 0 && dot <= 0))
                behind.push_back(v);
        }
        family.push_back(std::move(ahead));
        family.push_back(std::move(behind));
    }
    normalise_family(family);
    return family;
}

std::vector<std::array<double, 3>> directions_for(int dim, int k) {
    std::vector<std::array<double, 3>> out;
    if (dim == 2) {
        for (int i = 0; i < k; ++i) {
            const double a = 2.0 * std::numbers::pi * i / k;
            out.push_back({std::cos(a), std::sin(a), 0.0});
        }
    } else {
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < k; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / k;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            out.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
        }
    }
    return out;
}

// Offset t with measure{x . m >= t} = target; measure is decreasing in t.
double offset_for_measure(int w, int dim, const double* m, double target) {
    double spread = 0.0;
    for (int i = 0; i < dim; ++i)
        spread += std::abs(m[i]) * w;
    double lo = -spread, hi = spread;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (half_space_measure(w, dim, m, mid) >= target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<std::vector<Offset>> build_partial(int w, int dim, const Rational& gamma, int k) {
    std::vector<std::vector<Offset>> family;
    const double target = gamma.to_double() * std::pow(2.0 * w + 1.0, dim);
    if (target > std::pow(2.0 * w, dim))
        return family;
    const auto all = window_offsets(w, dim);
    for (const auto& m : directions_for(dim, k)) {
        const double t = offset_for_measure(w, dim, m.data(), target);
        std::vector<Offset> set;
        for (const Offset& v : all)
            if (v.dx * m[0] + v.dy * m[1] + v.dz * m[2] >= t - 1e-9)
                set.push_back(v);
        if (!set.empty())
            family.push_back(std::move(set));
    }
    normalise_family(family);
    return family;
}

std::mutex g_family_mutex;

}  // namespace

const std::vector<std::vector<Offset>>& rotated_lower_family(int w) {
    static std::map<int, std::vector<std::vector<Offset>>> cache;
    std::lock_guard lock(g_family_mutex);
    auto it = cache.find(w);
    if (it == cache.end())
        it = cache.emplace(w, build_rotated_lower(w)).first;
    return it->second;
}

const std::vector<std::vector<Offset>>& partial_family(int w, int dim, const Rational& gamma, int directions) {
    using Key = std::tuple<int, int, std::int64_t, std::int64_t, int>;
    static std::map<Key, std::vector<std::vector<Offset>>> cache;
    if (directions < 1)
        throw ParameterError("partial neighbourhood family needs at least one direction");
    std::lock_guard lock(g_family_mutex);
    const Key key{w, dim, gamma.num(), gamma.den(), directions};
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, build_partial(w, dim, gamma, directions)).first;
    return it->second;
}

// ---------------------------------------------------------------- dagger

namespace {

// Counter-clockwise hull, collinear points dropped.
std::vector<std::pair<int, int>> convex_hull(std::vector<std::pair<int, int>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3)
        return pts;
    auto cross = [](const std::pair<int, int>& o, const std::pair<int, int>& a, const std::pair<int, int>& b) {
        return static_cast<std::int64_t>(a.first - o.first) * (b.second - o.second) -
               static_cast<std::int64_t>(a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<int, int>> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0)
            --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0)
            --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

DaggerReport check_dagger(int r, int w, const Rational& tau_beta, double gamma) {
    if (r < 1 || w < 1)
        throw ParameterError("check_dagger needs r >= 1 and w >= 1");
    if (!(gamma > 0.5 && gamma < 1.0))
        throw ParameterError("gamma must lie in (1/2, 1)");
    DaggerReport report;
    const std::int64_t R = static_cast<std::int64_t>(r) * w;
    const std::int64_t R2 = R * R;
    const std::int64_t area = static_cast<std::int64_t>(2 * w + 1) * (2 * w + 1);
    // Half-width of the disc row at height y.
    std::vector<std::int64_t> X(static_cast<std::size_t>(R) + 1);
    for (std::int64_t y = 0; y <= R; ++y)
        X[y] = isqrt(R2 - y * y);
    auto half_width = [&](std::int64_t y) -> std::int64_t { return std::abs(y) > R ? -1 : X[std::abs(y)]; };
    auto inside = [&](std::int64_t x, std::int64_t y) { return x * x + y * y <= R2; };

    // (a): by symmetry only the quadrant x, y >= 0 is needed.
    report.a = true;
    for (std::int64_t b = 0; b <= R && report.a; ++b)
        for (std::int64_t a = 0; a <= X[b]; ++a) {
            std::int64_t c = 0;
            for (std::int64_t y = b - w; y <= b + w; ++y) {
                const std::int64_t h = half_width(y);
                if (h < 0)
                    continue;
                c += std::max<std::int64_t>(0, std::min(a + w, h) - std::max(a - w, -h) + 1);
            }
            if (!tau_beta.count_at_least(c, area)) {
                report.a = false;
                break;
            }
        }

    // (b)
    const double target = gamma * static_cast<double>(area);
    if (target > 4.0 * w * w)
        return report;  // no gamma-partial neighbourhood exists at all
    const auto dirs = directions_for(2, 720);
    report.b = true;
    std::vector<std::pair<int, int>> outside;
    for (std::int64_t b = 0; b <= R + 1 && report.b; ++b)
        for (std::int64_t a = 0; a <= R + 1; ++a) {
            if (inside(a, b))
                continue;
            bool touches = false;
            for (int ey = -1; ey <= 1 && !touches; ++ey)
                for (int ex = -1; ex <= 1 && !touches; ++ex)
                    touches = inside(a + ex, b + ey);
            if (!touches)
                continue;
            outside.clear();
            for (int dy = -w; dy <= w; ++dy)
                for (int dx = -w; dx <= w; ++dx)
                    if (!inside(a + dx, b + dy))
                        outside.emplace_back(dx, dy);
            const auto hull = convex_hull(outside);
            auto passes = [&](double mx, double my) {
                double h = std::numeric_limits<double>::infinity();
                for (const auto& [dx, dy] : hull)
                    h = std::min(h, dx * mx + dy * my);
                const double m[2] = {mx, my};
                return half_space_measure(w, 2, m, h - 1e-9) <= target + 1e-9;
            };
            const double norm = std::hypot(static_cast<double>(a), static_cast<double>(b));
            bool ok = passes(a / norm, b / norm);
            // Supporting lines along hull edges, then a uniform sweep.
            for (std::size_t i = 0; i < hull.size() && !ok && hull.size() > 1; ++i) {
                const auto& [px, py] = hull[i];
                const auto& [qx, qy] = hull[(i + 1) % hull.size()];
                const double ex = qx - px, ey = qy - py;
                const double len = std::hypot(ex, ey);
                ok = passes(-ey / len, ex / len);
            }
            for (std::size_t i = 0; i < dirs.size() && !ok; ++i)
                ok = passes(dirs[i][0], dirs[i][1]);
            if (!ok) {
                report.b = false;
                break;
            }
        }
    return report;
}

bool check_dagger_conditions(int r, int w, const Rational& tau_beta, double gamma) {
    return check_dagger(r, w, tau_beta, gamma).ok();
}

std::optional<int> find_min_r(int w, const Rational& tau_beta, double gamma, int r_max) {
    for (int r = 1; r <= r_max; ++r)
        if (check_dagger_conditions(r, w, tau_beta, gamma))
            return r;
    return std::nullopt;
}

// ---------------------------------------------------------------- events

void EventSpec::validate() const {
    if (tau < Rational(0, 1) || tau > Rational(1, 1))
        throw ParameterError("event tau outside [0,1]: " + tau.to_string());
    const bool partial = kind == EventKind::pn || kind == EventKind::pn3d;
    if (partial) {
        if (!gamma)
            throw ParameterError("event " + std::string(to_string(kind)) + " needs gamma");
        if (!(*gamma > Rational(1, 2) && *gamma < Rational(1, 1)))
            throw ParameterError("gamma must lie in (1/2, 1), got " + gamma->to_string());
        if (directions < 1)
            throw ParameterError("pn needs at least one direction");
    } else if (gamma) {
        throw ParameterError("gamma only applies to pn and pn3d");
    }
}

bool event_supports_dim(EventKind kind, int dim) {
    switch (kind) {
    case EventKind::uh:
        return dim == 2 || dim == 3;
    case EventKind::euh:
    case EventKind::eju:
    case EventKind::pn3d:
        return dim == 3;
    default:
        return dim == 2;
    }
}

int event_reach(EventKind kind, int w) {
    switch (kind) {
    case EventKind::ruh:
    case EventKind::rju:
        return 2 * w;
    case EventKind::euh:
    case EventKind::eju:
        return (3 * w + 1) / 2;
    default:
        return w;
    }
}

bool event_holds(const Configuration& config, NodeId u, const EventSpec& spec) {
    spec.validate();
    if (!event_supports_dim(spec.kind, config.dim()))
        throw ParameterError("event " + std::string(to_string(spec.kind)) + " is not defined in dimension " +
                             std::to_string(config.dim()));
    const Coord c = config.coord(u);
    auto type_at = [&](int dx, int dy, int dz) { return config[config.index({c.x + dx, c.y + dy, c.z + dz})]; };
    return event_holds_at(type_at, config.params().w, config.dim(), spec);
}

void write_event_scan_csv(std::ostream& out, const Configuration& config, const std::vector<NodeId>& nodes,
                          const std::vector<EventSpec>& specs) {
    out << "x,y,z,kind,type,tau,gamma,holds\n";
    for (NodeId u : nodes) {
        const Coord c = config.coord(u);
        for (const auto& spec : specs) {
            out << c.x << ',' << c.y << ',' << c.z << ',' << to_string(spec.kind) << ',' << to_string(spec.type)
                << ',' << spec.tau.to_string() << ',' << (spec.gamma ? spec.gamma->to_string() : "") << ','
                << (event_holds(config, u, spec) ? 1 : 0) << '\n';
        }
    }
}

// ---------------------------------------------------------------- densities

bool in_right_extended(const ModelParams& params, Coord u, Coord v) {
    const int dx = torus_delta(u.x, v.x, params.n);
    const int dy = torus_delta(u.y, v.y, params.n);
    return dx >= -params.w && dx <= 2 * params.w && std::abs(dy) <= params.w;
}

Region r0_box(const ModelParams& params, Coord u, int a) {
    if (a < 0)
        throw ParameterError("r0_box needs a >= 0");
    return Region::box(params, {u.x, u.y - a, 0}, {params.w + 1, 2 * a + 1, 1});
}

namespace {

std::vector<NodeId> nonempty_nodes(const Region& A) {
    auto nodes = A.nodes();
    if (nodes.empty())
        throw ParameterError("density of an empty region");
    return nodes;
}

}  // namespace

Rational xi(const Configuration& config, const Region& A) {
    const auto nodes = nonempty_nodes(A);
    std::int64_t alpha = 0;
    for (NodeId u : nodes)
        alpha += config[u] == NodeType::Alpha;
    return Rational(alpha, static_cast<std::int64_t>(nodes.size()));
}

Rational xi_flipped(const Configuration& config, const Region& A, const Region& B) {
    const auto nodes = nonempty_nodes(A);
    std::int64_t alpha = 0;
    for (NodeId u : nodes)
        alpha += config[u] == NodeType::Alpha && !B.contains(u);
    return Rational(alpha, static_cast<std::int64_t>(nodes.size()));
}

Rational xi_star(const ModelParams& params, const Region& A, Coord u, const Rational& tau) {
    const auto nodes = nonempty_nodes(A);
    std::int64_t a0 = 0;
    for (NodeId v : nodes)
        a0 += in_right_extended(params, u, coord_on(params, v));
    const auto total = static_cast<std::int64_t>(nodes.size());
    return (tau * Rational(a0, 1) + Rational(total - a0, 2)) * Rational(1, total);
}

Rational xi_star_flipped(const ModelParams& params, const Region& A, Coord u, const Region& B, const Rational& tau) {
    const auto nodes = nonempty_nodes(A);
    std::int64_t a1 = 0, a2 = 0;
    for (NodeId v : nodes) {
        if (B.contains(v))
            continue;
        if (in_right_extended(params, u, coord_on(params, v)))
            ++a1;
        else
            ++a2;
    }
    const auto total = static_cast<std::int64_t>(nodes.size());
    return (tau * Rational(a1, 1) + Rational(a2, 2)) * Rational(1, total);
}

}  // namespace schelling
