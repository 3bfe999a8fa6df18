#pragma once

#include "tatune/dbm.hpp"
#include "tatune/model.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace tatune {

/// l0, e1, l1, ..., en, ln as two parallel lists (`locations.size() == edges.size() + 1`).
struct WitnessPath {
    std::vector<LocationId> locations;
    std::vector<EdgeId> edges;

    std::size_t length() const { return edges.size(); }
    friend bool operator==(const WitnessPath&, const WitnessPath&) = default;
};

inline std::string format_path(const TimedAutomaton& ta, const WitnessPath& w) {
    std::string s;
    for (std::size_t i = 0; i < w.locations.size(); ++i) {
        if (i) s += "," + ta.edges[w.edges[i - 1]].name + ",";
        s += ta.locations[w.locations[i]].name;
    }
    return s;
}

struct VerifierLimits {
    /// Cap on stored symbolic states; unset means unbounded for diagonal-free models.
    std::optional<std::size_t> max_states;
    /// Cap used for models with diagonal atoms when `max_states` is unset.
    std::size_t diagonal_budget = 200000;
};

enum class Verdict { Reachable, Unreachable, Inconclusive, LimitExceeded };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Reachable: return "reachable";
    case Verdict::Unreachable: return "unreachable";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::LimitExceeded: return "limit-exceeded";
    }
    return "?";
}

struct ReachResult {
    Verdict verdict = Verdict::Unreachable;
    WitnessPath witness; // set when Reachable
    std::size_t states = 0;
};

/// Clocks all zero, restricted to the initial invariant.
inline Zone initial_zone(const TimedAutomaton& ta) {
    Zone z = Zone::zero(ta.clock_count());
    z.constrain(ta.locations[ta.initial_location()].invariant);
    return z;
}

/// Delay in the source (bounded by its invariant), take the edge, enter the target.
inline Zone successor(const Zone& z, const std::vector<SimpleConstraint>& inv_src, const Edge& edge,
                      const std::vector<SimpleConstraint>& inv_dst) {
    Zone next = z;
    next.up();
    next.constrain(inv_src);
    next.constrain(edge.guard);
    for (ClockId c : edge.resets) next.reset(c);
    next.constrain(inv_dst);
    return next;
}

/// Largest absolute constant compared against each clock (index 0 unused).
inline std::vector<std::int64_t> max_constants(const TimedAutomaton& ta) {
    std::vector<std::int64_t> m(ta.clock_count() + 1, 0);
    auto scan = [&](const std::vector<SimpleConstraint>& atoms) {
        for (const auto& a : atoms) {
            const std::int64_t c = std::llabs(a.bound);
            if (a.lhs) m[a.lhs] = std::max(m[a.lhs], c);
            if (a.rhs) m[a.rhs] = std::max(m[a.rhs], c);
        }
    };
    for (const auto& l : ta.locations) scan(l.invariant);
    for (const auto& e : ta.edges) scan(e.guard);
    return m;
}

/// Breadth-first zone-graph exploration from the initial state towards `ta.targets`.
inline ReachResult check_reachability(const TimedAutomaton& ta, const VerifierLimits& limits = {}) {
    struct State {
        LocationId loc;
        Zone zone;
        std::size_t parent;
        EdgeId via;
    };
    constexpr std::size_t kRoot = static_cast<std::size_t>(-1);

    const bool diagonal = ta.has_diagonal();
    const auto max_const = max_constants(ta);
    std::optional<std::size_t> cap = limits.max_states;
    if (diagonal && !cap) cap = limits.diagonal_budget;

    std::vector<std::vector<EdgeId>> outgoing(ta.locations.size());
    for (EdgeId e = 0; e < ta.edges.size(); ++e) outgoing[ta.edges[e].source].push_back(e);

    std::vector<State> states;
    std::vector<std::vector<std::size_t>> passed(ta.locations.size());
    std::deque<std::size_t> queue;

    auto witness_of = [&](std::size_t idx) {
        WitnessPath w;
        for (std::size_t i = idx; i != kRoot; i = states[i].parent) {
            w.locations.push_back(states[i].loc);
            if (states[i].parent != kRoot) w.edges.push_back(states[i].via);
        }
        std::reverse(w.locations.begin(), w.locations.end());
        std::reverse(w.edges.begin(), w.edges.end());
        return w;
    };

    ReachResult result;
    Zone z0 = initial_zone(ta);
    if (z0.is_empty()) return result;
    if (!diagonal) z0.extrapolate(max_const);
    const LocationId l0 = ta.initial_location();
    states.push_back({l0, std::move(z0), kRoot, 0});
    passed[l0].push_back(0);
    queue.push_back(0);
    if (ta.is_target(l0)) {
        result.verdict = Verdict::Reachable;
        result.witness = witness_of(0);
        result.states = 1;
        return result;
    }

    while (!queue.empty()) {
        const std::size_t cur = queue.front();
        queue.pop_front();
        const LocationId loc = states[cur].loc;
        for (EdgeId e : outgoing[loc]) {
            const Edge& edge = ta.edges[e];
            Zone next = successor(states[cur].zone, ta.locations[loc].invariant, edge,
                                  ta.locations[edge.target].invariant);
            if (next.is_empty()) continue;
            if (!diagonal) next.extrapolate(max_const);
            bool covered = false;
            for (std::size_t s : passed[edge.target])
                if (next.subset_of(states[s].zone)) {
                    covered = true;
                    break;
                }
            if (covered) continue;
            states.push_back({edge.target, std::move(next), cur, e});
            const std::size_t idx = states.size() - 1;
            if (ta.is_target(edge.target)) {
                result.verdict = Verdict::Reachable;
                result.witness = witness_of(idx);
                result.states = states.size();
                return result;
            }
            if (cap && states.size() > *cap) {
                result.verdict = diagonal ? Verdict::Inconclusive : Verdict::LimitExceeded;
                result.states = states.size();
                return result;
            }
            passed[edge.target].push_back(idx);
            queue.push_back(idx);
        }
    }
    result.states = states.size();
    return result;
}

} // namespace tatune
