// event_kind.hpp
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace schelling {

// Threshold events on the alpha (or beta) count of a window around a node.
//   uh    fewer than tau(2w+1)^d nodes of the type in N(u)
//   ruh   fewer than tau(2w+1)(3w+1) in the right extended neighbourhood
//   ln    at least tau(2w+1)^2 in the lower neighbourhood
//   rn    at least tau(2w+1)^2 in some rotated lower neighbourhood
//   pn    at least tau(2w+1)^2 in some gamma-partial neighbourhood
//   ju    uh, but within 2w+1 nodes of the threshold
//   rju   ruh, but within 3w+1 nodes of the threshold
//   euh   fewer than tau(3w+1)^3 in the 3D extended neighbourhood
//   eju   euh, but within (3w+1)^2 nodes of the threshold
//   pn3d  pn with defining planes in 3D
enum class EventKind { uh, ruh, ln, rn, pn, ju, rju, euh, eju, pn3d };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

}  // namespace schelling
