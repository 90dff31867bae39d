#include "schelling/event_kind.hpp"

#include <array>
#include <utility>

namespace schelling {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 10> kNames{{
    {EventKind::uh, "uh"},
    {EventKind::ruh, "ruh"},
    {EventKind::ln, "ln"},
    {EventKind::rn, "rn"},
    {EventKind::pn, "pn"},
    {EventKind::ju, "ju"},
    {EventKind::rju, "rju"},
    {EventKind::euh, "euh"},
    {EventKind::eju, "eju"},
    {EventKind::pn3d, "pn3d"},
}};

}  // namespace

std::string_view to_string(EventKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind)
            return name;
    return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
    for (const auto& [k, name] : kNames)
        if (name == text)
            return k;
    return std::nullopt;
}

}  // namespace schelling
