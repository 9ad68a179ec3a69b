#pragma once

#include <string>
#include <vector>

#include "dpa/builtin_maps.hpp"
#include "dpa/option.hpp"

namespace dpa::testing {

inline Option opt(Primitive p) { return Option{p, std::nullopt}; }
inline Option opt(Primitive p, Primitive t) { return Option{p, t}; }

using enum Primitive;

// Hand-scripted option-level walkthrough solving each built-in map.
inline std::vector<Option> scripted_solution(const std::string& map_id) {
    if (map_id == "domain1")
        return {opt(GoDown), opt(GoLeft, Interact), opt(Interact), opt(GoRight, Interact),
                opt(Interact), opt(GoLeft, GoUp), opt(GoUp), opt(GoLeft)};
    if (map_id == "domain2")
        return {opt(GoDown), opt(GoLeft, Interact), opt(Interact), opt(GoRight, Interact),
                opt(Interact), opt(GoRight, Interact), opt(Interact), opt(GoLeft, GoUp),
                opt(GoUp), opt(GoLeft)};
    if (map_id == "domain3")
        return {opt(GoDown), opt(GoLeft, Interact), opt(Interact), opt(GoRight, GoDown),
                opt(GoDown), opt(GoRight, Interact), opt(Interact), opt(GoLeft, Interact),
                opt(Interact), opt(GoLeft, Interact), opt(Interact), opt(GoRight, GoUp),
                opt(GoUp), opt(GoLeft, GoUp), opt(GoUp), opt(GoLeft)};
    if (map_id == "domain4")
        return {opt(GoDown), opt(GoLeft, Interact), opt(Interact), opt(GoRight, GoDown),
                opt(GoDown), opt(GoLeft, Interact), opt(Interact), opt(GoRight, Interact),
                opt(Interact), opt(GoRight, Interact), opt(Interact), opt(GoRight, GoUp),
                opt(GoUp), opt(GoLeft, GoUp), opt(GoUp), opt(GoLeft)};
    if (map_id == "domain4-shortcut")
        return {opt(GoDown), opt(GoLeft, Interact), opt(Interact), opt(GoRight, GoDown),
                opt(GoRight, GoDown), opt(GoDown), opt(GoLeft, Interact), opt(Interact),
                opt(GoRight, GoUp), opt(GoUp), opt(GoLeft, GoUp), opt(GoUp), opt(GoLeft)};
    if (map_id == "domain5")
        return {opt(GoDown), opt(GoLeft, Interact), opt(Interact), opt(GoRight, Interact),
                opt(Interact), opt(GoRight, GoDown), opt(GoDown), opt(GoRight, Interact),
                opt(Interact), opt(GoLeft, Interact), opt(Interact), opt(GoLeft, Interact),
                opt(Interact), opt(GoRight, GoDown), opt(GoDown), opt(GoLeft, Interact),
                opt(Interact), opt(GoRight, GoUp), opt(GoUp), opt(GoRight, GoUp),
                opt(GoUp), opt(GoLeft, GoUp), opt(GoUp), opt(GoLeft)};
    return {};
}

// One-floor corridor used by availability oracles: no ladders, a lever, a
// treasure, walls at both ends.
inline const char* corridor_map_text() {
    return "#############\n"
           "#S....l..t.H#\n"
           "####g########\n"
           "#############\n";
}

}  // namespace dpa::testing
