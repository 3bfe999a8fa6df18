#pragma once

#include "tatune/error.hpp"
#include "tatune/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tatune {

/// Clock reset every `period` transitions and compared against `constant` when reset.
struct PeriodicRestriction {
    std::int64_t period = 1;
    std::int64_t constant = 0;
    CompareOp op = CompareOp::LessEq;
    friend bool operator==(const PeriodicRestriction&, const PeriodicRestriction&) = default;
};

/// Restriction family for a scheduler with `clocks` clocks on path `path` (1 or 2).
inline std::vector<PeriodicRestriction> restriction_sets(int clocks, int path) {
    using enum CompareOp;
    if (path != 1 && path != 2) throw AnalysisError(ErrorKind::InvalidParams, "path index must be 1 or 2");
    if (clocks != 3 && clocks != 5 && clocks != 7)
        throw AnalysisError(ErrorKind::InvalidParams, "clock count must be 3, 5 or 7");
    std::vector<PeriodicRestriction> r;
    if (path == 1) {
        r = {{2, 11, GreaterEq}, {3, 15, LessEq}};
        if (clocks >= 5) r.insert(r.end(), {{4, 21, GreaterEq}, {5, 25, LessEq}});
        if (clocks >= 7) r.insert(r.end(), {{6, 31, GreaterEq}, {7, 35, LessEq}});
    } else {
        r = {{4, 17, GreaterEq}, {5, 20, LessEq}};
        if (clocks >= 5) r.insert(r.end(), {{8, 33, GreaterEq}, {9, 36, LessEq}});
        if (clocks >= 7) r.insert(r.end(), {{12, 49, GreaterEq}, {13, 52, LessEq}});
    }
    return r;
}

/// Total-time bound used when none is given: loose for one path, tight for two.
inline std::int64_t default_total_bound(int paths, int length) {
    return paths == 1 ? 6 * std::int64_t{length} : 4 * std::int64_t{length} - 10;
}

/// Scheduler automaton: `paths` chains of `length` machine locations from l0 to the
/// unreachable target l1. Restriction clocks are shared by position across paths;
/// clock `g` is never reset and bounded by `total_bound` on each final transition.
inline TimedAutomaton generate_scheduler(int clocks, int paths, int length,
                                         std::optional<std::int64_t> total_bound = std::nullopt) {
    if (paths != 1 && paths != 2) throw AnalysisError(ErrorKind::InvalidParams, "path count must be 1 or 2");
    if (length < 1) throw AnalysisError(ErrorKind::InvalidParams, "path length must be positive");
    const std::int64_t bound = total_bound.value_or(default_total_bound(paths, length));
    if (bound < 0) throw AnalysisError(ErrorKind::InvalidParams, "total bound must be nonnegative");

    std::vector<std::vector<PeriodicRestriction>> sets;
    for (int p = 1; p <= paths; ++p) sets.push_back(restriction_sets(clocks, p));
    const std::size_t per_path = sets.front().size();
    if (static_cast<int>(per_path) + 1 != clocks)
        throw AnalysisError(ErrorKind::InvalidParams, "restriction set does not match the clock count");

    TimedAutomaton ta;
    for (std::size_t q = 0; q < per_path; ++q) ta.clocks.push_back("x" + std::to_string(q + 1));
    ta.clocks.push_back("g");
    const ClockId global = static_cast<ClockId>(per_path + 1);

    ta.locations.push_back({"l0", {}, true});
    ta.locations.push_back({"l1", {}, false});
    ta.targets = {1};
    for (int p = 1; p <= paths; ++p) {
        const auto first = static_cast<LocationId>(ta.locations.size());
        for (int k = 1; k <= length; ++k)
            ta.locations.push_back({"p" + std::to_string(p) + "_m" + std::to_string(k), {}, false});
        const auto& rs = sets[static_cast<std::size_t>(p - 1)];
        for (int k = 0; k <= length; ++k) {
            Edge e;
            e.name = "p" + std::to_string(p) + "_t" + std::to_string(k);
            e.source = k == 0 ? 0 : first + static_cast<LocationId>(k - 1);
            e.target = k == length ? 1 : first + static_cast<LocationId>(k);
            for (std::size_t q = 0; q < rs.size(); ++q) {
                const auto clock = static_cast<ClockId>(q + 1);
                if (k == 0) {
                    e.resets.push_back(clock);
                } else if (k % rs[q].period == 0) {
                    e.guard.push_back(normalize_atom(clock, kZeroClock, rs[q].op, rs[q].constant));
                    e.resets.push_back(clock);
                }
            }
            if (k == length) e.guard.push_back(normalize_atom(global, kZeroClock, CompareOp::LessEq, bound));
            ta.edges.push_back(std::move(e));
        }
    }
    ta.validate();
    return ta;
}

} // namespace tatune
