#pragma once

#include "tatune/bound.hpp"
#include "tatune/error.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tatune {

/// Clock index into a DBM: 0 is the constant-zero reference, k >= 1 names clocks[k-1].
using ClockId = std::uint32_t;
inline constexpr ClockId kZeroClock = 0;

using LocationId = std::uint32_t;
using EdgeId = std::uint32_t;

/// Atom `lhs - rhs < bound` or `lhs - rhs <= bound`.
struct SimpleConstraint {
    ClockId lhs = kZeroClock;
    ClockId rhs = kZeroClock;
    bool strict = false;
    std::int64_t bound = 0;
    /// Written as a lower bound (`>=`/`>`); only affects printing.
    bool lower_form = false;

    bool is_diagonal() const { return lhs != kZeroClock && rhs != kZeroClock; }
    Bound as_bound() const { return {bound, strict}; }

    friend bool operator==(const SimpleConstraint& a, const SimpleConstraint& b) {
        return a.lhs == b.lhs && a.rhs == b.rhs && a.strict == b.strict && a.bound == b.bound;
    }
};

enum class CompareOp { Less, LessEq, Greater, GreaterEq };

/// Normal form of `x - y op c` (pass kZeroClock as y for a plain clock).
inline SimpleConstraint normalize_atom(ClockId x, ClockId y, CompareOp op, std::int64_t c) {
    SimpleConstraint out;
    switch (op) {
    case CompareOp::Less:
    case CompareOp::LessEq:
        out.lhs = x;
        out.rhs = y;
        out.bound = c;
        out.strict = op == CompareOp::Less;
        break;
    case CompareOp::Greater:
    case CompareOp::GreaterEq:
        out.lhs = y;
        out.rhs = x;
        out.bound = -c;
        out.strict = op == CompareOp::Greater;
        out.lower_form = true;
        break;
    }
    return out;
}

struct Location {
    std::string name;
    std::vector<SimpleConstraint> invariant;
    bool initial = false;
};

struct Edge {
    std::string name;
    LocationId source = 0;
    LocationId target = 0;
    std::vector<SimpleConstraint> guard;
    std::vector<ClockId> resets; // sorted, unique
};

struct TimedAutomaton {
    std::vector<std::string> clocks;
    std::vector<Location> locations;
    std::vector<Edge> edges;
    std::vector<LocationId> targets; // sorted, unique

    std::size_t clock_count() const { return clocks.size(); }

    LocationId initial_location() const {
        for (LocationId i = 0; i < locations.size(); ++i)
            if (locations[i].initial) return i;
        throw SemanticError("no initial location");
    }

    std::optional<LocationId> find_location(std::string_view name) const {
        for (LocationId i = 0; i < locations.size(); ++i)
            if (locations[i].name == name) return i;
        return std::nullopt;
    }

    std::optional<EdgeId> find_edge(std::string_view name) const {
        for (EdgeId i = 0; i < edges.size(); ++i)
            if (edges[i].name == name) return i;
        return std::nullopt;
    }

    std::optional<ClockId> find_clock(std::string_view name) const {
        for (std::size_t i = 0; i < clocks.size(); ++i)
            if (clocks[i] == name) return static_cast<ClockId>(i + 1);
        return std::nullopt;
    }

    const std::string& clock_name(ClockId c) const {
        static const std::string zero = "0";
        return c == kZeroClock ? zero : clocks.at(c - 1);
    }

    bool is_target(LocationId l) const {
        return std::binary_search(targets.begin(), targets.end(), l);
    }

    bool has_diagonal() const {
        auto diag = [](const std::vector<SimpleConstraint>& atoms) {
            return std::any_of(atoms.begin(), atoms.end(),
                               [](const SimpleConstraint& a) { return a.is_diagonal(); });
        };
        for (const auto& l : locations)
            if (diag(l.invariant)) return true;
        for (const auto& e : edges)
            if (diag(e.guard)) return true;
        return false;
    }

    /// Throws SemanticError when structural invariants are violated.
    void validate() const {
        std::size_t initial = 0;
        for (const auto& l : locations) initial += l.initial ? 1 : 0;
        if (initial != 1)
            throw SemanticError("expected exactly one initial location, found " +
                                std::to_string(initial));
        auto check_atoms = [&](const std::vector<SimpleConstraint>& atoms, const std::string& owner) {
            for (const auto& a : atoms) {
                if (a.lhs > clocks.size() || a.rhs > clocks.size())
                    throw SemanticError("atom of " + owner + " references an unknown clock");
                if (a.lhs == a.rhs)
                    throw SemanticError("atom of " + owner + " compares a clock with itself");
            }
        };
        for (const auto& l : locations) check_atoms(l.invariant, l.name);
        for (const auto& e : edges) {
            if (e.source >= locations.size() || e.target >= locations.size())
                throw SemanticError("edge " + e.name + " has an invalid endpoint");
            check_atoms(e.guard, e.name);
            for (ClockId c : e.resets)
                if (c == kZeroClock || c > clocks.size())
                    throw SemanticError("edge " + e.name + " resets an unknown clock");
        }
        for (LocationId t : targets)
            if (t >= locations.size()) throw SemanticError("invalid target location");
    }
};

/// Pretty surface text of an atom, e.g. `x >= 9` or `x - y <= 3`.
inline std::string format_atom(const TimedAutomaton& ta, const SimpleConstraint& a) {
    const auto op_upper = a.strict ? " < " : " <= ";
    const auto op_lower = a.strict ? " > " : " >= ";
    if (a.lhs == kZeroClock)
        return ta.clock_name(a.rhs) + op_lower + std::to_string(-a.bound);
    if (a.rhs == kZeroClock)
        return ta.clock_name(a.lhs) + op_upper + std::to_string(a.bound);
    if (a.lower_form)
        return ta.clock_name(a.rhs) + " - " + ta.clock_name(a.lhs) + op_lower +
               std::to_string(-a.bound);
    return ta.clock_name(a.lhs) + " - " + ta.clock_name(a.rhs) + op_upper + std::to_string(a.bound);
}

// ---------------------------------------------------------------------------
// Constraint table
// ---------------------------------------------------------------------------

struct ConstraintId {
    std::uint32_t value = 0;
    friend auto operator<=>(ConstraintId, ConstraintId) = default;
};

/// Set of constraint ids; bit i stands for ConstraintId{i}.
using ConstraintSet = boost::dynamic_bitset<std::uint64_t>;
using Reduction = ConstraintSet;

enum class OwnerKind { Location, Edge };

struct ConstraintEntry {
    OwnerKind kind = OwnerKind::Location;
    std::uint32_t owner = 0;
    std::uint32_t atom_index = 0;
    SimpleConstraint atom;
};

inline std::vector<ConstraintId> to_ids(const ConstraintSet& set) {
    std::vector<ConstraintId> ids;
    ids.reserve(set.count());
    for (auto i = set.find_first(); i != ConstraintSet::npos; i = set.find_next(i))
        ids.push_back(ConstraintId{static_cast<std::uint32_t>(i)});
    return ids;
}

class ConstraintTable {
public:
    ConstraintTable() = default;

    /// Indexes every invariant atom (locations in order) then every guard atom (edges in order).
    static ConstraintTable build(const TimedAutomaton& ta) {
        ConstraintTable t;
        t.ta_ = std::make_shared<const TimedAutomaton>(ta);
        for (LocationId l = 0; l < ta.locations.size(); ++l) {
            t.owner_first_loc_.push_back(static_cast<std::uint32_t>(t.entries_.size()));
            const auto& inv = ta.locations[l].invariant;
            for (std::uint32_t k = 0; k < inv.size(); ++k)
                t.entries_.push_back({OwnerKind::Location, l, k, inv[k]});
        }
        for (EdgeId e = 0; e < ta.edges.size(); ++e) {
            t.owner_first_edge_.push_back(static_cast<std::uint32_t>(t.entries_.size()));
            const auto& g = ta.edges[e].guard;
            for (std::uint32_t k = 0; k < g.size(); ++k)
                t.entries_.push_back({OwnerKind::Edge, e, k, g[k]});
        }
        t.universe_ = ConstraintSet(t.entries_.size());
        t.universe_.set();
        return t;
    }

    std::size_t size() const { return entries_.size(); }
    const ConstraintEntry& entry(ConstraintId id) const { return entries_.at(id.value); }
    const std::vector<ConstraintEntry>& entries() const { return entries_; }

    const ConstraintSet& universe() const { return universe_; }
    void set_universe(const ConstraintSet& u) {
        if (u.size() != entries_.size()) throw SemanticError("universe width mismatch");
        universe_ = u;
    }

    ConstraintSet empty_set() const { return ConstraintSet(entries_.size()); }

    ConstraintSet make_set(const std::vector<ConstraintId>& ids) const {
        ConstraintSet s(entries_.size());
        for (auto id : ids) s.set(id.value);
        return s;
    }

    ConstraintId location_atom(LocationId l, std::uint32_t k) const {
        return ConstraintId{owner_first_loc_.at(l) + k};
    }
    ConstraintId edge_atom(EdgeId e, std::uint32_t k) const {
        return ConstraintId{owner_first_edge_.at(e) + k};
    }

    const std::string& owner_name(ConstraintId id) const {
        const auto& en = entry(id);
        return en.kind == OwnerKind::Location ? ta_->locations[en.owner].name
                                              : ta_->edges[en.owner].name;
    }

    /// `owner#index` surface id.
    std::string name(ConstraintId id) const {
        return owner_name(id) + "#" + std::to_string(entry(id).atom_index);
    }

    std::string pretty(ConstraintId id) const { return format_atom(*ta_, entry(id).atom); }

    /// Resolves `owner#index`; throws SemanticError if unknown.
    ConstraintId resolve(std::string_view text) const {
        const auto hash = text.find('#');
        if (hash == std::string_view::npos)
            throw SemanticError("constraint id '" + std::string(text) + "' lacks '#'");
        const auto owner = text.substr(0, hash);
        const auto index_text = text.substr(hash + 1);
        std::uint32_t index = 0;
        if (index_text.empty()) throw SemanticError("constraint id '" + std::string(text) + "' lacks an index");
        for (char ch : index_text) {
            if (ch < '0' || ch > '9')
                throw SemanticError("constraint id '" + std::string(text) + "' has a bad index");
            index = index * 10 + static_cast<std::uint32_t>(ch - '0');
        }
        if (auto l = ta_->find_location(owner)) {
            if (index >= ta_->locations[*l].invariant.size())
                throw SemanticError("location " + std::string(owner) + " has no atom " +
                                    std::to_string(index));
            return location_atom(*l, index);
        }
        if (auto e = ta_->find_edge(owner)) {
            if (index >= ta_->edges[*e].guard.size())
                throw SemanticError("edge " + std::string(owner) + " has no atom " +
                                    std::to_string(index));
            return edge_atom(*e, index);
        }
        throw SemanticError("unknown constraint owner '" + std::string(owner) + "'");
    }

    const TimedAutomaton& automaton() const { return *ta_; }

private:
    std::shared_ptr<const TimedAutomaton> ta_;
    std::vector<ConstraintEntry> entries_;
    std::vector<std::uint32_t> owner_first_loc_;
    std::vector<std::uint32_t> owner_first_edge_;
    ConstraintSet universe_;
};

// ---------------------------------------------------------------------------
// Reductions and relaxations
// ---------------------------------------------------------------------------

/// Nonnegative relaxation amount or +inf (removal).
struct RelaxAmount {
    std::int64_t value = 0;
    bool infinite = false;

    static RelaxAmount finite(std::int64_t v) { return {v, false}; }
    static RelaxAmount removal() { return {0, true}; }
    friend bool operator==(const RelaxAmount&, const RelaxAmount&) = default;
};

using RelaxationValuation = std::map<ConstraintId, RelaxAmount>;

/// Copy of `ta` without the atoms in `red`; names and ids are preserved.
inline TimedAutomaton apply_reduction(const TimedAutomaton& ta, const ConstraintTable& table,
                                      const Reduction& red) {
    TimedAutomaton out = ta;
    for (LocationId l = 0; l < ta.locations.size(); ++l) {
        auto& inv = out.locations[l].invariant;
        inv.clear();
        const auto& src = ta.locations[l].invariant;
        for (std::uint32_t k = 0; k < src.size(); ++k)
            if (!red.test(table.location_atom(l, k).value)) inv.push_back(src[k]);
    }
    for (EdgeId e = 0; e < ta.edges.size(); ++e) {
        auto& g = out.edges[e].guard;
        g.clear();
        const auto& src = ta.edges[e].guard;
        for (std::uint32_t k = 0; k < src.size(); ++k)
            if (!red.test(table.edge_atom(e, k).value)) g.push_back(src[k]);
    }
    return out;
}

/// Adds r(c) to each bound in the domain; removal drops the atom.
inline TimedAutomaton apply_relaxation(const TimedAutomaton& ta, const ConstraintTable& table,
                                       const RelaxationValuation& r) {
    TimedAutomaton out = ta;
    auto relax_list = [&](std::vector<SimpleConstraint>& atoms, auto id_of) {
        std::vector<SimpleConstraint> kept;
        for (std::uint32_t k = 0; k < atoms.size(); ++k) {
            auto it = r.find(id_of(k));
            if (it == r.end()) {
                kept.push_back(atoms[k]);
            } else if (!it->second.infinite) {
                auto a = atoms[k];
                a.bound += it->second.value;
                kept.push_back(a);
            }
        }
        atoms = std::move(kept);
    };
    for (LocationId l = 0; l < out.locations.size(); ++l)
        relax_list(out.locations[l].invariant, [&](std::uint32_t k) { return table.location_atom(l, k); });
    for (EdgeId e = 0; e < out.edges.size(); ++e)
        relax_list(out.edges[e].guard, [&](std::uint32_t k) { return table.edge_atom(e, k); });
    return out;
}

inline Reduction complement_guarantee(const Reduction& red, const ConstraintTable& table) {
    return table.universe() - red;
}

} // namespace tatune
