#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpa/random.hpp"

namespace dpa {

// Geometry constants. Cells are 16px, the agent is an 8x8 box, and an object
// can be interacted with when its cell center is within 16px of the agent
// center.
inline constexpr int kCellPx = 16;
inline constexpr int kAgentPx = 8;
inline constexpr int kInteractRadiusPx = 16;
inline constexpr int kMinStepPx = 2;
inline constexpr int kMaxStepPx = 4;

enum class Primitive { GoUp, GoDown, GoLeft, GoRight, Interact };

inline constexpr Primitive kAllPrimitives[] = {
    Primitive::GoUp, Primitive::GoDown, Primitive::GoLeft,
    Primitive::GoRight, Primitive::Interact};

inline const char* to_string(Primitive p) {
    switch (p) {
        case Primitive::GoUp: return "go_up";
        case Primitive::GoDown: return "go_down";
        case Primitive::GoLeft: return "go_left";
        case Primitive::GoRight: return "go_right";
        case Primitive::Interact: return "interact";
    }
    return "?";
}

inline std::optional<Primitive> primitive_from_string(const std::string& s) {
    for (Primitive p : kAllPrimitives)
        if (s == to_string(p)) return p;
    return std::nullopt;
}

using PrimitiveSet = std::set<Primitive>;

// Real-valued sensor vector. Layout depends on the loaded map: x/y of the
// agent, one angle in {0,1} per lever, key x/y if a key exists, bolt flag if
// a bolt exists, treasure x/y.
using LowLevelState = std::vector<double>;

struct StateLayout {
    int lever_count = 0;
    bool has_key = false;
    bool has_bolt = false;

    int dim() const { return 2 + lever_count + (has_key ? 2 : 0) + (has_bolt ? 1 : 0) + 2; }
    int x_agent() const { return 0; }
    int y_agent() const { return 1; }
    int lever(int i) const { return 2 + i; }
    int key_x() const { return 2 + lever_count; }
    int key_y() const { return key_x() + 1; }
    int bolt() const { return 2 + lever_count + (has_key ? 2 : 0); }
    int treasure_x() const { return bolt() + (has_bolt ? 1 : 0); }
    int treasure_y() const { return treasure_x() + 1; }

    std::string var_name(int i) const {
        if (i == 0) return "x_agent";
        if (i == 1) return "y_agent";
        if (i < 2 + lever_count) return "theta_" + std::to_string(i - 2);
        if (has_key && i == key_x()) return "x_key";
        if (has_key && i == key_y()) return "y_key";
        if (has_bolt && i == bolt()) return "x_bolt";
        if (i == treasure_x()) return "x_treasure";
        return "y_treasure";
    }
};

struct MapParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CellPos {
    int cx = 0;
    int cy = 0;
    bool operator==(const CellPos&) const = default;
};

enum class Cell : std::uint8_t {
    Wall, Empty, Ladder, Door, Lever, Key, Bolt, Treasure, Home, Start, Bag
};

// Parsed maze: grid of cells plus the lever->door link table. Coordinates are
// (column, row) in cells; pixel coordinates grow right/down.
struct MazeMap {
    std::string id;
    std::vector<std::vector<Cell>> grid;  // grid[row][col]
    int cols = 0;
    int rows = 0;
    CellPos start, home, bag;
    std::vector<CellPos> levers;
    std::vector<CellPos> doors;
    std::optional<CellPos> key;
    std::optional<CellPos> bolt;
    CellPos treasure;
    std::vector<std::vector<int>> lever_links;  // lever index -> door indices
    StateLayout layout;

    int width_px() const { return cols * kCellPx; }
    int height_px() const { return rows * kCellPx; }

    Cell at(int cx, int cy) const {
        if (cx < 0 || cy < 0 || cx >= cols || cy >= rows) return Cell::Wall;
        return grid[cy][cx];
    }

    static double center_x(CellPos c) { return c.cx * kCellPx + kCellPx / 2.0; }
    static double center_y(CellPos c) { return c.cy * kCellPx + kCellPx / 2.0; }
};

inline Cell cell_from_char(char ch, int line, int col) {
    switch (ch) {
        case '#': return Cell::Wall;
        case '.': return Cell::Empty;
        case '=': return Cell::Ladder;
        case 'd': return Cell::Door;
        case 'l': return Cell::Lever;
        case 'k': return Cell::Key;
        case 'b': return Cell::Bolt;
        case 't': return Cell::Treasure;
        case 'H': return Cell::Home;
        case 'S': return Cell::Start;
        case 'g': return Cell::Bag;
    }
    throw MapParseError("unknown map character '" + std::string(1, ch) + "' at line " +
                        std::to_string(line) + ", column " + std::to_string(col + 1));
}

inline MazeMap parse_map(const std::string& map_text, const std::string& id = "custom") {
    MazeMap m;
    m.id = id;
    std::istringstream in(map_text);
    std::string line;
    int line_no = 0;
    bool in_links = false;
    int starts = 0, homes = 0, bags = 0, treasures = 0, keys = 0, bolts = 0;

    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        if (line == "links:") {
            in_links = true;
            continue;
        }
        if (!in_links) {
            std::vector<Cell> row;
            row.reserve(line.size());
            for (std::size_t c = 0; c < line.size(); ++c) {
                Cell cell = cell_from_char(line[c], line_no, static_cast<int>(c));
                CellPos pos{static_cast<int>(c), static_cast<int>(m.grid.size())};
                switch (cell) {
                    case Cell::Start: ++starts; m.start = pos; break;
                    case Cell::Home: ++homes; m.home = pos; break;
                    case Cell::Bag: ++bags; m.bag = pos; break;
                    case Cell::Lever: m.levers.push_back(pos); break;
                    case Cell::Door: m.doors.push_back(pos); break;
                    case Cell::Key: ++keys; m.key = pos; break;
                    case Cell::Bolt: ++bolts; m.bolt = pos; break;
                    case Cell::Treasure: ++treasures; m.treasure = pos; break;
                    default: break;
                }
                row.push_back(cell);
            }
            m.grid.push_back(std::move(row));
        } else {
            // "lever_index -> door_index[,door_index...]"
            auto arrow = line.find("->");
            if (arrow == std::string::npos)
                throw MapParseError("malformed link at line " + std::to_string(line_no) +
                                    ": expected 'lever -> door[,door...]'");
            int lever = std::stoi(line.substr(0, arrow));
            if (lever < 0 || lever >= static_cast<int>(m.levers.size()))
                throw MapParseError("link at line " + std::to_string(line_no) +
                                    " references nonexistent lever " + std::to_string(lever));
            m.lever_links.resize(m.levers.size());
            std::istringstream rhs(line.substr(arrow + 2));
            std::string tok;
            while (std::getline(rhs, tok, ',')) {
                int door = std::stoi(tok);
                if (door < 0 || door >= static_cast<int>(m.doors.size()))
                    throw MapParseError("link at line " + std::to_string(line_no) +
                                        " references nonexistent door " + std::to_string(door));
                m.lever_links[lever].push_back(door);
            }
        }
    }

    m.rows = static_cast<int>(m.grid.size());
    for (auto& row : m.grid) m.cols = std::max(m.cols, static_cast<int>(row.size()));
    for (auto& row : m.grid) row.resize(m.cols, Cell::Wall);
    if (m.rows == 0) throw MapParseError("empty map");
    if (starts != 1) throw MapParseError("map must contain exactly one start 'S'");
    if (homes != 1) throw MapParseError("map must contain exactly one home 'H'");
    if (bags != 1) throw MapParseError("map must contain exactly one bag slot 'g'");
    if (treasures != 1) throw MapParseError("map must contain exactly one treasure 't'");
    if (keys > 1 || bolts > 1) throw MapParseError("at most one key and one bolt supported");
    if ((keys == 1) != (bolts == 1))
        throw MapParseError("bolt must be present iff key is present");
    m.lever_links.resize(m.levers.size());
    std::vector<char> linked(m.doors.size(), 0);
    for (auto& ds : m.lever_links)
        for (int d : ds) linked[d] = 1;
    for (std::size_t d = 0; d < linked.size(); ++d)
        if (!linked[d])
            throw MapParseError("door " + std::to_string(static_cast<int>(d)) +
                                " is not linked to any lever");

    m.layout.lever_count = static_cast<int>(m.levers.size());
    m.layout.has_key = keys == 1;
    m.layout.has_bolt = bolts == 1;
    return m;
}

struct StepResult {
    LowLevelState state;
    PrimitiveSet available;
    bool goal_flag = false;
    int steps_cost = 1;
    bool rejected = false;
};

// Deterministic-geometry simulator: the only stochasticity is the 2-4px step
// size, drawn from the per-environment seeded generator.
class Environment {
public:
    explicit Environment(MazeMap map, std::uint64_t rng_seed = 0)
        : map_(std::move(map)), rng_(rng_seed) {
        reset();
    }

    const MazeMap& map() const { return map_; }
    const StateLayout& layout() const { return map_.layout; }

    StepResult reset() {
        agent_x_ = map_.start.cx * kCellPx + (kCellPx - kAgentPx) / 2;
        agent_y_ = map_.start.cy * kCellPx + (kCellPx - kAgentPx);
        lever_angles_.assign(map_.levers.size(), 0);
        key_in_bag_ = false;
        bolt_open_ = false;
        treasure_in_bag_ = false;
        return observe();
    }

    StepResult observe() const {
        StepResult r;
        r.state = state();
        r.available = available_primitives();
        r.goal_flag = goal_reached();
        return r;
    }

    LowLevelState state() const {
        const StateLayout& lo = map_.layout;
        LowLevelState s(lo.dim(), 0.0);
        s[lo.x_agent()] = agent_x_ + kAgentPx / 2.0;
        s[lo.y_agent()] = agent_y_ + kAgentPx / 2.0;
        for (int i = 0; i < lo.lever_count; ++i) s[lo.lever(i)] = lever_angles_[i];
        if (lo.has_key) {
            CellPos kc = key_in_bag_ ? map_.bag : *map_.key;
            s[lo.key_x()] = MazeMap::center_x(kc);
            s[lo.key_y()] = MazeMap::center_y(kc);
        }
        if (lo.has_bolt) s[lo.bolt()] = bolt_open_ ? 1.0 : 0.0;
        CellPos tc = treasure_in_bag_ ? map_.bag : map_.treasure;
        s[lo.treasure_x()] = MazeMap::center_x(tc);
        s[lo.treasure_y()] = MazeMap::center_y(tc);
        return s;
    }

    // Per-dimension scales mapping raw state values into [0,1].
    std::vector<double> normalization_scales() const {
        const StateLayout& lo = map_.layout;
        std::vector<double> sc(lo.dim(), 1.0);
        sc[lo.x_agent()] = map_.width_px();
        sc[lo.y_agent()] = map_.height_px();
        if (lo.has_key) {
            sc[lo.key_x()] = map_.width_px();
            sc[lo.key_y()] = map_.height_px();
        }
        sc[lo.treasure_x()] = map_.width_px();
        sc[lo.treasure_y()] = map_.height_px();
        return sc;
    }

    PrimitiveSet available_primitives() const {
        PrimitiveSet avail;
        if (can_move(0, -kMinStepPx)) avail.insert(Primitive::GoUp);
        if (can_move(0, kMinStepPx)) avail.insert(Primitive::GoDown);
        if (can_move(-kMinStepPx, 0)) avail.insert(Primitive::GoLeft);
        if (can_move(kMinStepPx, 0)) avail.insert(Primitive::GoRight);
        if (closest_actionable().has_value()) avail.insert(Primitive::Interact);
        return avail;
    }

    StepResult step_primitive(Primitive p) {
        if (!available_primitives().count(p)) {
            StepResult r = observe();
            r.rejected = true;
            r.steps_cost = 0;
            return r;
        }
        switch (p) {
            case Primitive::GoUp: slide(0, -1); break;
            case Primitive::GoDown: slide(0, 1); break;
            case Primitive::GoLeft: slide(-1, 0); break;
            case Primitive::GoRight: slide(1, 0); break;
            case Primitive::Interact: interact(); break;
        }
        return observe();
    }

    bool goal_reached() const {
        int cx = (agent_x_ + kAgentPx / 2) / kCellPx;
        int cy = (agent_y_ + kAgentPx / 2) / kCellPx;
        return treasure_in_bag_ && cx == map_.home.cx && cy == map_.home.cy;
    }

    bool key_in_bag() const { return key_in_bag_; }
    bool treasure_in_bag() const { return treasure_in_bag_; }
    bool bolt_open() const { return bolt_open_; }

private:
    bool door_open(int door_index) const {
        // A door is open iff an odd number of its linked levers are pulled.
        int parity = 0;
        for (std::size_t l = 0; l < map_.lever_links.size(); ++l)
            for (int d : map_.lever_links[l])
                if (d == door_index) parity ^= lever_angles_[l];
        return parity != 0;
    }

    bool passable(int cx, int cy) const {
        switch (map_.at(cx, cy)) {
            case Cell::Wall:
            case Cell::Bag:
                return false;
            case Cell::Door: {
                for (std::size_t d = 0; d < map_.doors.size(); ++d)
                    if (map_.doors[d].cx == cx && map_.doors[d].cy == cy)
                        return door_open(static_cast<int>(d));
                return false;
            }
            case Cell::Bolt:
                return bolt_open_;
            default:
                return true;
        }
    }

    bool box_passable(int x, int y) const {
        if (x < 0 || y < 0 || x + kAgentPx > map_.width_px() || y + kAgentPx > map_.height_px())
            return false;
        int c0 = x / kCellPx, c1 = (x + kAgentPx - 1) / kCellPx;
        int r0 = y / kCellPx, r1 = (y + kAgentPx - 1) / kCellPx;
        for (int cy = r0; cy <= r1; ++cy)
            for (int cx = c0; cx <= c1; ++cx)
                if (!passable(cx, cy)) return false;
        return true;
    }

    bool box_on_ladder(int x, int y) const {
        int c0 = x / kCellPx, c1 = (x + kAgentPx - 1) / kCellPx;
        int r0 = y / kCellPx, r1 = (y + kAgentPx - 1) / kCellPx;
        for (int cy = r0; cy <= r1; ++cy)
            for (int cx = c0; cx <= c1; ++cx)
                if (map_.at(cx, cy) == Cell::Ladder) return true;
        return false;
    }

    // Vertical moves are climbing: the agent box must sit fully inside one
    // cell column and touch a ladder cell before or after the move.
    bool can_move(int dx, int dy) const {
        int nx = agent_x_ + dx, ny = agent_y_ + dy;
        for (int i = 1; i <= std::max(std::abs(dx), std::abs(dy)); ++i) {
            int sx = agent_x_ + (dx == 0 ? 0 : (dx > 0 ? i : -i));
            int sy = agent_y_ + (dy == 0 ? 0 : (dy > 0 ? i : -i));
            if (!box_passable(sx, sy)) return false;
        }
        if (dy != 0) {
            if (agent_x_ / kCellPx != (agent_x_ + kAgentPx - 1) / kCellPx) return false;
            if (!box_on_ladder(agent_x_, agent_y_) && !box_on_ladder(nx, ny)) return false;
        }
        return true;
    }

    void slide(int sx, int sy) {
        int amount = uniform_int(rng_, kMinStepPx, kMaxStepPx);
        for (int i = 0; i < amount; ++i) {
            int nx = agent_x_ + sx, ny = agent_y_ + sy;
            if (!box_passable(nx, ny)) break;
            if (sy != 0 && !box_on_ladder(agent_x_, agent_y_) && !box_on_ladder(nx, ny)) break;
            agent_x_ = nx;
            agent_y_ = ny;
        }
    }

    struct Actionable {
        enum Kind { LeverK, KeyK, BoltK, TreasureK } kind;
        int index;   // lever index, otherwise unused
        double dist;
    };

    std::optional<Actionable> closest_actionable() const {
        double ax = agent_x_ + kAgentPx / 2.0, ay = agent_y_ + kAgentPx / 2.0;
        std::optional<Actionable> best;
        auto consider = [&](Actionable::Kind kind, int index, CellPos c) {
            double dx = MazeMap::center_x(c) - ax, dy = MazeMap::center_y(c) - ay;
            double dist = std::sqrt(dx * dx + dy * dy);
            if (dist > kInteractRadiusPx) return;
            if (!best || dist < best->dist) best = Actionable{kind, index, dist};
        };
        for (std::size_t l = 0; l < map_.levers.size(); ++l)
            consider(Actionable::LeverK, static_cast<int>(l), map_.levers[l]);
        if (map_.key && !key_in_bag_) consider(Actionable::KeyK, 0, *map_.key);
        if (map_.bolt && !bolt_open_ && key_in_bag_) consider(Actionable::BoltK, 0, *map_.bolt);
        if (!treasure_in_bag_) consider(Actionable::TreasureK, 0, map_.treasure);
        return best;
    }

    void interact() {
        auto a = closest_actionable();
        if (!a) return;
        switch (a->kind) {
            case Actionable::LeverK: lever_angles_[a->index] ^= 1; break;
            case Actionable::KeyK: key_in_bag_ = true; break;
            case Actionable::BoltK: bolt_open_ = true; break;
            case Actionable::TreasureK: treasure_in_bag_ = true; break;
        }
    }

    MazeMap map_;
    Rng rng_;
    int agent_x_ = 0;  // top-left of the agent box, px
    int agent_y_ = 0;
    std::vector<int> lever_angles_;
    bool key_in_bag_ = false;
    bool bolt_open_ = false;
    bool treasure_in_bag_ = false;
};

}  // namespace dpa
