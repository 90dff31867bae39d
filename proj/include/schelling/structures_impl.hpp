// structures_impl.hpp
// Template body of event_holds_at; included from structures.hpp.
#pragma once

#include <vector>

namespace schelling {

namespace detail {

template <class TypeAt>
std::int64_t count_box(TypeAt& type_at, NodeType t, int x0, int x1, int y0, int y1, int z0, int z1) {
    std::int64_t c = 0;
    for (int dz = z0; dz <= z1; ++dz)
        for (int dy = y0; dy <= y1; ++dy)
            for (int dx = x0; dx <= x1; ++dx)
                c += type_at(dx, dy, dz) == t;
    return c;
}

template <class TypeAt>
bool any_set_reaches(TypeAt& type_at, NodeType t, int w, bool three,
                     const std::vector<std::vector<Offset>>& family, const Rational& tau, std::int64_t total) {
    if (family.empty())
        return false;
    // Cache the window once; the family revisits each offset many times.
    const int side = 2 * w + 1;
    std::vector<unsigned char> hit(static_cast<std::size_t>(side) * side * (three ? side : 1));
    auto slot = [&](const Offset& o) {
        return static_cast<std::size_t>((o.dx + w) + side * ((o.dy + w) + side * (three ? o.dz + w : 0)));
    };
    for (int dz = three ? -w : 0; dz <= (three ? w : 0); ++dz)
        for (int dy = -w; dy <= w; ++dy)
            for (int dx = -w; dx <= w; ++dx)
                hit[slot({dx, dy, dz})] = type_at(dx, dy, dz) == t;
    for (const auto& set : family) {
        std::int64_t c = 0;
        for (const Offset& o : set)
            c += hit[slot(o)];
        if (tau.count_at_least(c, total))
            return true;
    }
    return false;
}

}  // namespace detail

template <class TypeAt>
bool event_holds_at(TypeAt&& type_at, int w, int dim, const EventSpec& spec) {
    const NodeType t = spec.type;
    const std::int64_t side = 2 * w + 1;
    const std::int64_t area = side * side;
    switch (spec.kind) {
    case EventKind::uh: {
        const int zr = dim == 3 ? w : 0;
        const std::int64_t total = dim == 3 ? area * side : area;
        return spec.tau.count_below(detail::count_box(type_at, t, -w, w, -w, w, -zr, zr), total);
    }
    case EventKind::ju: {
        const std::int64_t c = detail::count_box(type_at, t, -w, w, -w, w, 0, 0);
        return spec.tau.count_below(c, area) && spec.tau.count_at_least(c + side, area);
    }
    case EventKind::ruh:
    case EventKind::rju: {
        const std::int64_t total = side * (3 * w + 1);
        const std::int64_t c = detail::count_box(type_at, t, -w, 2 * w, -w, w, 0, 0);
        if (!spec.tau.count_below(c, total))
            return false;
        return spec.kind == EventKind::ruh || spec.tau.count_at_least(c + 3 * w + 1, total);
    }
    case EventKind::ln: {
        std::int64_t c = detail::count_box(type_at, t, -w, w, -w, -1, 0, 0);
        c += detail::count_box(type_at, t, -w, 0, 0, 0, 0, 0);
        return spec.tau.count_at_least(c, area);
    }
    case EventKind::rn:
        return detail::any_set_reaches(type_at, t, w, false, rotated_lower_family(w), spec.tau, area);
    case EventKind::pn:
        return detail::any_set_reaches(type_at, t, w, false, partial_family(w, 2, *spec.gamma, spec.directions), spec.tau,
                                       area);
    case EventKind::pn3d:
        return detail::any_set_reaches(type_at, t, w, true, partial_family(w, 3, *spec.gamma, spec.directions), spec.tau,
                                       area * side);
    case EventKind::euh:
    case EventKind::eju: {
        const int h = (3 * w + 1) / 2;
        const std::int64_t s = 3 * w + 1;
        const std::int64_t c = detail::count_box(type_at, t, -h, h, -h, h, -h, h);
        if (!spec.tau.count_below(c, s * s * s))
            return false;
        return spec.kind == EventKind::euh || spec.tau.count_at_least(c + s * s, s * s * s);
    }
    }
    return false;
}

}  // namespace schelling
