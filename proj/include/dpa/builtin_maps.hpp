#pragma once

#include <stdexcept>
#include <string>

#include "dpa/env.hpp"

namespace dpa {

// Five built-in maze configurations of increasing complexity.
//   domain1: 1 lever, no key/bolt
//   domain2: key + bolt, no levers
//   domain3: 1 lever, key, bolt
//   domain4: like domain3 plus a shortcut corridor bypassing the bolt
//   domain5: 3 levers (two gate the way down, one gates the way home), key, bolt

inline const char* builtin_map_text(const std::string& name) {
    if (name == "domain1")
        return "############\n"
               "#H..S......#\n"
               "####=###g###\n"
               "#l..=..d..t#\n"
               "############\n"
               "links:\n"
               "0 -> 0\n";
    if (name == "domain2")
        return "#############\n"
               "#H..S.......#\n"
               "####=####g###\n"
               "#.k.=....b.t#\n"
               "#############\n"
               "links:\n";
    if (name == "domain3")
        return "####################\n"
               "#H..S..............#\n"
               "####=##########g####\n"
               "#l..=....d....=....#\n"
               "##############=#####\n"
               "#.t..b........=..k.#\n"
               "####################\n"
               "links:\n"
               "0 -> 0\n";
    if (name == "domain4")
        return "####################\n"
               "#H..S..............#\n"
               "####=######g########\n"
               "#l..=..d..=......=.#\n"
               "##########=######=##\n"
               "#..k......=..b.t.=.#\n"
               "####################\n"
               "links:\n"
               "0 -> 0\n";
    if (name == "domain5")
        return "########################\n"
               "#H.d.S.................#\n"
               "#####=############g#####\n"
               "#l...=..l...d...d..=...#\n"
               "###################=####\n"
               "#l......=......b...=..k#\n"
               "########=###############\n"
               "#.t.....=..............#\n"
               "########################\n"
               "links:\n"
               "0 -> 1\n"
               "1 -> 2\n"
               "2 -> 0\n";
    throw std::runtime_error("unknown built-in map: " + name);
}

inline MazeMap load_builtin_map(const std::string& name) {
    return parse_map(builtin_map_text(name), name);
}

inline Environment load_map(const std::string& map_text, std::uint64_t rng_seed,
                            const std::string& id = "custom") {
    return Environment(parse_map(map_text, id), rng_seed);
}

inline Environment load_builtin(const std::string& name, std::uint64_t rng_seed) {
    return Environment(load_builtin_map(name), rng_seed);
}

}  // namespace dpa
