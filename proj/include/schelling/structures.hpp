// structures.hpp
// Regions, stable structures, firewalls, the threshold events and the
// actual/idealized density functions.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "schelling/event_kind.hpp"
#include "schelling/lattice.hpp"
#include "schelling/rational.hpp"

namespace schelling {

// A set of torus nodes: an explicit sorted list, a wrapped axis box, or a
// Euclidean disc (ball in 3D).
class Region {
public:
    enum class Shape { List, Box, Disc };

    static Region list(const ModelParams& params, std::vector<NodeId> nodes);
    // Nodes lo + (i, j, k) with 0 <= i < extent.x etc., wrapped.
    static Region box(const ModelParams& params, Coord lo, Coord extent);
    // Nodes at Euclidean torus distance <= radius from centre. radius < n/4.
    static Region disc(const ModelParams& params, Coord centre, Rational radius);

    Shape shape() const { return shape_; }
    bool contains(NodeId id) const;
    bool contains(Coord c) const;
    // Sorted, duplicate free.
    std::vector<NodeId> nodes() const;
    std::size_t size() const;

    Coord centre() const { return lo_; }
    const Rational& radius() const { return radius_; }

private:
    Region() = default;

    Shape shape_ = Shape::List;
    int n_ = 0;
    int dim_ = 2;
    std::vector<NodeId> list_;
    Coord lo_;
    Coord extent_;
    Rational radius_;
};

// Every node of the region has at least tau_t (2w+1)^dim nodes of type t in
// N(u) intersected with the region.
bool is_stable(const Configuration& config, const Region& region, NodeType t);
inline bool is_alpha_stable(const Configuration& c, const Region& r) { return is_stable(c, r, NodeType::Alpha); }
inline bool is_beta_stable(const Configuration& c, const Region& r) { return is_stable(c, r, NodeType::Beta); }

// Every node of the disc has the given type (beta by default).
bool is_firewall(const Configuration& config, Coord centre, Rational radius, NodeType t = NodeType::Beta);

// Nodes outside the disc with a node of the disc at Chebyshev distance 1.
// 2D only; radius < n/4 - 1.
std::vector<NodeId> outer_boundary(const ModelParams& params, Coord centre, Rational radius);

// Largest integer radius R with the disc of radius R about centre made
// entirely of type t (the disc of radius 0 is the centre itself); -1 if the
// centre is not of type t. Searches up to max_radius.
int largest_monochrome_radius(const Configuration& config, Coord centre, NodeType t, int max_radius);

// Disc conditions on the infinite lattice for the disc of radius r*w.
//   (a) every disc node v has |N(v) cap disc| >= tau_beta (2w+1)^2, counted
//       exactly;
//   (b) every outer-boundary node v has N(v) minus the disc inside some
//       gamma-partial neighbourhood. Checked by a sufficient test: for the
//       radial direction and 360 others, the part of the square N'(v) (side
//       2w) on or above the lowest line through N(v) minus the disc must
//       have area at most gamma (2w+1)^2.
struct DaggerReport {
    bool a = false;
    bool b = false;
    bool ok() const { return a && b; }
};
DaggerReport check_dagger(int r, int w, const Rational& tau_beta, double gamma);
bool check_dagger_conditions(int r, int w, const Rational& tau_beta, double gamma);
// Smallest r in [1, r_max] passing both conditions, or nullopt.
std::optional<int> find_min_r(int w, const Rational& tau_beta, double gamma, int r_max = 64);

// ---------------------------------------------------------------- events

struct EventSpec {
    EventKind kind = EventKind::uh;
    NodeType type = NodeType::Alpha;  // the type whose nodes are counted
    Rational tau;
    std::optional<Rational> gamma;  // pn and pn3d only, in (1/2, 1)
    int directions = 360;           // pn / pn3d direction family size

    // Throws ParameterError if gamma is present for other kinds, missing or
    // out of range for pn kinds, or tau lies outside [0,1].
    void validate() const;
};

// Dimension the event is defined in (uh and ju work in both).
bool event_supports_dim(EventKind kind, int dim);

// Largest |offset| along any axis the event inspects.
int event_reach(EventKind kind, int w);

// Offsets relative to u.
struct Offset {
    int dx = 0, dy = 0, dz = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

// Rotated lower neighbourhoods of the origin: every distinct set of the form
// {v in N(0): v strictly left of a directed line through 0, or on the ray
// ahead of it} for all line directions, with 0 always included. Each set is
// sorted by (dy, dx).
const std::vector<std::vector<Offset>>& rotated_lower_family(int w);

// Node sets of the gamma-partial neighbourhoods for `directions` defining
// directions (2D: equally spaced angles; 3D: Fibonacci-sphere normals).
// Empty when gamma (2w+1)^dim exceeds the measure (2w)^dim of N'(0).
const std::vector<std::vector<Offset>>& partial_family(int w, int dim, const Rational& gamma, int directions);

// Area (volume) of {x in [-w, w]^dim : x . normal >= t}.
double half_space_measure(int w, int dim, const double* normal, double t);

// Event evaluation given `type_at(dx, dy, dz)`, the type of the node at
// that offset from u.
template <class TypeAt>
bool event_holds_at(TypeAt&& type_at, int w, int dim, const EventSpec& spec);

bool event_holds(const Configuration& config, NodeId u, const EventSpec& spec);

// One CSV row per (node, spec): x,y,z,kind,type,tau,gamma,holds
void write_event_scan_csv(std::ostream& out, const Configuration& config, const std::vector<NodeId>& nodes,
                          const std::vector<EventSpec>& specs);

// ---------------------------------------------------------------- densities

// Right extended neighbourhood of u: x' - x in [-w, 2w], |y' - y| <= w.
bool in_right_extended(const ModelParams& params, Coord u, Coord v);

// The rectangle 0 <= x' - x <= w, |y' - y| <= a about u.
Region r0_box(const ModelParams& params, Coord u, int a);

// Proportion of alpha nodes in A; with B, after setting B to beta.
Rational xi(const Configuration& config, const Region& A);
Rational xi_flipped(const Configuration& config, const Region& A, const Region& B);
// (tau |A0| + |A1| / 2) / |A|, A0 = A cap right-extended(u).
Rational xi_star(const ModelParams& params, const Region& A, Coord u, const Rational& tau);
// (tau |A1| + |A2| / 2) / |A|, A0 = A cap B, A1 = (A - B) cap right-extended(u).
Rational xi_star_flipped(const ModelParams& params, const Region& A, Coord u, const Region& B, const Rational& tau);

}  // namespace schelling

#include "schelling/structures_impl.hpp"
