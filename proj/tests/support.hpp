#pragma once

#include "tatune/tatune.hpp"

#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace tatune::testing {

inline std::string read_model(const std::string& name) {
    std::ifstream in(std::string(TATUNE_MODELS_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing model " + name);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline TimedAutomaton fig1() { return parse_model(read_model("fig1.ta")); }

/// Reduction from `owner#index` names against the table's automaton.
inline Reduction ids(const ConstraintTable& table, const std::vector<std::string>& names) {
    Reduction r = table.empty_set();
    for (const auto& n : names) r.set(table.resolve(n).value);
    return r;
}

inline std::vector<std::string> names(const ConstraintTable& table, const ConstraintSet& set) {
    std::vector<std::string> out;
    for (auto id : to_ids(set)) out.push_back(table.name(id));
    return out;
}

inline bool reachable(const TimedAutomaton& ta) {
    return check_reachability(ta).verdict == Verdict::Reachable;
}

inline bool sufficient(const TimedAutomaton& ta, const ConstraintTable& table, const Reduction& red) {
    return reachable(apply_reduction(ta, table, red));
}

struct RandomTaOptions {
    int max_locations = 8;
    int clocks = 2;
    std::int64_t max_constant = 8;
    bool acyclic = false;
    std::size_t max_constraints = 10;
};

/// Random diagonal-free automaton with l0 initial and the last location as target.
/// Invariants are upper bounds only, so the zero valuation is always admissible.
inline TimedAutomaton random_ta(std::mt19937& rng, const RandomTaOptions& opt = {}) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    TimedAutomaton ta;
    for (int c = 0; c < opt.clocks; ++c) ta.clocks.push_back("c" + std::to_string(c));
    const int n = pick(3, opt.max_locations);
    for (int l = 0; l < n; ++l) ta.locations.push_back({"q" + std::to_string(l), {}, l == 0});
    std::size_t budget = opt.max_constraints;
    auto atom = [&](bool invariant) {
        const auto x = static_cast<ClockId>(pick(1, opt.clocks));
        const auto c = static_cast<std::int64_t>(pick(invariant ? 1 : 0, static_cast<int>(opt.max_constant)));
        CompareOp op;
        if (invariant) op = pick(0, 3) == 0 ? CompareOp::Less : CompareOp::LessEq;
        else op = static_cast<CompareOp>(pick(0, 3));
        return normalize_atom(x, kZeroClock, op, c);
    };
    for (int l = 1; l < n && budget > 0; ++l)
        if (pick(0, 2) == 0) {
            ta.locations[l].invariant.push_back(atom(true));
            --budget;
        }
    auto add_edge = [&](int s, int t) {
        Edge e;
        e.name = "a" + std::to_string(ta.edges.size());
        e.source = static_cast<LocationId>(s);
        e.target = static_cast<LocationId>(t);
        const int guards = pick(0, 2);
        for (int g = 0; g < guards && budget > 0; ++g, --budget) e.guard.push_back(atom(false));
        for (int c = 1; c <= opt.clocks; ++c)
            if (pick(0, 2) == 0) e.resets.push_back(static_cast<ClockId>(c));
        ta.edges.push_back(std::move(e));
    };
    // a spine keeps the target structurally reachable
    for (int l = 0; l + 1 < n; ++l) add_edge(l, l + 1);
    const int extra = pick(0, n);
    for (int k = 0; k < extra; ++k) {
        int s = pick(0, n - 1), t = pick(0, n - 1);
        if (opt.acyclic) {
            if (s == t) continue;
            if (s > t) std::swap(s, t);
        }
        add_edge(s, t);
    }
    ta.targets = {static_cast<LocationId>(n - 1)};
    ta.validate();
    return ta;
}

/// Every subset of the universe, as reductions, in increasing bit-pattern order.
inline std::vector<Reduction> all_subsets(const ConstraintTable& table) {
    const auto members = to_ids(table.universe());
    std::vector<Reduction> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << members.size()); ++mask) {
        Reduction r = table.empty_set();
        for (std::size_t i = 0; i < members.size(); ++i)
            if (mask >> i & 1) r.set(members[i].value);
        out.push_back(std::move(r));
    }
    return out;
}

/// Sufficiency of every subset, by direct verifier calls.
struct BruteForce {
    std::vector<Reduction> sets;
    std::vector<bool> suff;

    BruteForce(const TimedAutomaton& ta, const ConstraintTable& table) : sets(all_subsets(table)) {
        for (const auto& s : sets) suff.push_back(sufficient(ta, table, s));
    }

    std::size_t min_sufficient_size() const {
        std::size_t best = SIZE_MAX;
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (suff[i]) best = std::min(best, sets[i].count());
        return best;
    }

    std::size_t max_insufficient_size() const {
        std::size_t best = 0;
        for (std::size_t i = 0; i < sets.size(); ++i)
            if (!suff[i]) best = std::max(best, sets[i].count());
        return best;
    }

    std::vector<Reduction> msrs() const {
        std::vector<Reduction> out;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (!suff[i]) continue;
            bool minimal = true;
            for (std::size_t j = 0; j < sets.size() && minimal; ++j)
                if (j != i && suff[j] && sets[j].is_proper_subset_of(sets[i])) minimal = false;
            if (minimal) out.push_back(sets[i]);
        }
        return out;
    }

    std::vector<Reduction> mirs() const {
        std::vector<Reduction> out;
        for (std::size_t i = 0; i < sets.size(); ++i) {
            if (suff[i]) continue;
            bool maximal = true;
            for (std::size_t j = 0; j < sets.size() && maximal; ++j)
                if (j != i && !suff[j] && sets[i].is_proper_subset_of(sets[j])) maximal = false;
            if (maximal) out.push_back(sets[i]);
        }
        return out;
    }
};

/// Random automaton whose target is unreachable but becomes reachable once the
/// whole universe is removed; the universe holds at most `opt.max_constraints` atoms.
inline TimedAutomaton random_instance(std::mt19937& rng, const RandomTaOptions& opt = {}) {
    for (;;) {
        auto ta = random_ta(rng, opt);
        const auto table = ConstraintTable::build(ta);
        if (table.size() == 0 || table.size() > opt.max_constraints) continue;
        if (reachable(ta)) continue;
        if (!sufficient(ta, table, table.universe())) continue;
        return ta;
    }
}

/// Feasibility of a path with every constraint kept (relaxation set empty).
inline bool path_realizable(const TimedAutomaton& ta, const WitnessPath& w) {
    const auto table = ConstraintTable::build(ta);
    return feasible(build_difference_system(ta, w, table.empty_set()), {});
}

/// Every path from the initial location to a target on an acyclic automaton.
inline std::vector<WitnessPath> target_paths(const TimedAutomaton& ta) {
    std::vector<WitnessPath> out;
    WitnessPath cur;
    cur.locations.push_back(ta.initial_location());
    std::function<void()> dfs = [&] {
        const auto here = cur.locations.back();
        if (ta.is_target(here)) out.push_back(cur);
        for (EdgeId e = 0; e < ta.edges.size(); ++e) {
            if (ta.edges[e].source != here) continue;
            cur.edges.push_back(e);
            cur.locations.push_back(ta.edges[e].target);
            dfs();
            cur.edges.pop_back();
            cur.locations.pop_back();
        }
    };
    dfs();
    return out;
}

} // namespace tatune::testing
