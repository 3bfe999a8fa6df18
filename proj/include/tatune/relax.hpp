#pragma once

#include "tatune/error.hpp"
#include "tatune/lattice.hpp"
#include "tatune/model.hpp"
#include "tatune/verifier.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tatune {

// ---------------------------------------------------------------------------
// Path encoding
// ---------------------------------------------------------------------------

/// Delays delta_lo..delta_hi, i.e. T_{hi+1} - T_lo; `empty` for the zero clock.
struct DelayInterval {
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool empty = true;
    friend bool operator==(const DelayInterval&, const DelayInterval&) = default;
};

/// Value of `clock` when the i-th edge of `path` fires (1 <= i <= length):
/// the delays since its last reset strictly before edge i.
inline DelayInterval gamma(const TimedAutomaton& ta, const WitnessPath& path, ClockId clock, std::size_t i) {
    if (i < 1 || i > path.length()) throw std::out_of_range("gamma: step index out of range");
    if (clock == kZeroClock) return {};
    std::size_t k = 0;
    for (std::size_t m = 1; m < i; ++m) {
        const auto& resets = ta.edges[path.edges[m - 1]].resets;
        if (std::binary_search(resets.begin(), resets.end(), clock)) k = m;
    }
    return {k, i - 1, false};
}

enum class RowOrigin { Delay, Guard, Arriving, Leaving };

/// T_a - T_b < / <= bound + p[relax] (no relaxation term when `relax` is unset).
struct DifferenceRow {
    std::size_t a = 0;
    std::size_t b = 0;
    std::int64_t bound = 0;
    bool strict = false;
    std::optional<std::size_t> relax;
    RowOrigin origin = RowOrigin::Delay;
    std::size_t step = 0;
};

struct DifferenceSystem {
    std::size_t time_vars = 1; // T_0..T_n
    std::vector<DifferenceRow> rows;
    std::vector<ConstraintId> relax_vars;
};

/// Rows of the path-realizability problem: delay order, one guard row per guard atom per edge
/// occurrence, arriving rows for l_1..l_n and leaving rows for l_0..l_{n-1}.
/// Atoms whose id is in `relax_set` (ids of ConstraintTable::build(ta)) get a shared variable.
inline DifferenceSystem build_difference_system(const TimedAutomaton& ta, const WitnessPath& path,
                                                const ConstraintSet& relax_set) {
    const auto table = ConstraintTable::build(ta);
    const std::size_t n = path.length();
    DifferenceSystem sys;
    sys.time_vars = n + 1;
    std::map<ConstraintId, std::size_t> var_of;
    auto relax_var = [&](ConstraintId id) -> std::optional<std::size_t> {
        if (id.value >= relax_set.size() || !relax_set.test(id.value)) return std::nullopt;
        auto [it, fresh] = var_of.emplace(id, sys.relax_vars.size());
        if (fresh) sys.relax_vars.push_back(id);
        return it->second;
    };
    // last_reset[c]: index of the latest edge resetting clock c so far (0 = never)
    std::vector<std::size_t> last_reset(ta.clock_count() + 1, 0);
    // clock value at prefix time t is T_t - T_last_reset; the zero clock is T_t - T_t
    auto add_atom = [&](const SimpleConstraint& atom, std::size_t t, ConstraintId id, RowOrigin origin,
                        std::size_t step) {
        const std::size_t kl = atom.lhs ? last_reset[atom.lhs] : t;
        const std::size_t kr = atom.rhs ? last_reset[atom.rhs] : t;
        sys.rows.push_back({kr, kl, atom.bound, atom.strict, relax_var(id), origin, step});
    };
    auto add_invariant = [&](LocationId l, std::size_t t, RowOrigin origin, std::size_t step) {
        const auto& inv = ta.locations[l].invariant;
        for (std::uint32_t k = 0; k < inv.size(); ++k) add_atom(inv[k], t, table.location_atom(l, k), origin, step);
    };

    for (std::size_t i = 0; i < n; ++i) sys.rows.push_back({i, i + 1, 0, false, std::nullopt, RowOrigin::Delay, i});
    if (n > 0) add_invariant(path.locations[0], 1, RowOrigin::Leaving, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        const EdgeId e = path.edges[i - 1];
        const auto& guard = ta.edges[e].guard;
        for (std::uint32_t k = 0; k < guard.size(); ++k) add_atom(guard[k], i, table.edge_atom(e, k), RowOrigin::Guard, i);
        for (ClockId c : ta.edges[e].resets) last_reset[c] = i;
        add_invariant(path.locations[i], i, RowOrigin::Arriving, i);
        if (i < n) add_invariant(path.locations[i], i + 1, RowOrigin::Leaving, i);
    }
    return sys;
}

// ---------------------------------------------------------------------------
// Feasibility by negative-cycle detection
// ---------------------------------------------------------------------------

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t n, std::int64_t d) {
        const std::int64_t g = std::gcd(n, d);
        return g ? Rational{n / g, d / g} : Rational{0, 1};
    }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const { return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Negative cycle as a covering constraint: sum_r coef[r] * p_r >= need.
struct CycleCut {
    std::vector<std::int64_t> coef;
    std::int64_t need = 0;
};

struct FeasibilityResult {
    bool feasible = false;
    std::vector<Rational> delays; // delta_0..delta_{n-1}, when feasible
    std::optional<CycleCut> cut;  // when infeasible
};

namespace detail {

/// Path weight value + strict_count * (-epsilon); strict edges are counted so that
/// a zero-valued cycle through a strict edge registers as negative.
struct Weight {
    std::int64_t value = 0;
    std::int64_t strict = 0; // <= 0
    friend auto operator<=>(const Weight&, const Weight&) = default;
    friend Weight operator+(Weight x, Weight y) { return {x.value + y.value, x.strict + y.strict}; }
};

} // namespace detail

/// Decides the system for fixed integer p (indexed like relax_vars).
inline FeasibilityResult solve_difference_system(const DifferenceSystem& sys, const std::vector<std::int64_t>& p) {
    using detail::Weight;
    const std::size_t nodes = sys.time_vars;
    std::vector<Weight> dist(nodes);
    std::vector<std::size_t> pred(nodes, static_cast<std::size_t>(-1));
    auto weight = [&](const DifferenceRow& r) {
        return Weight{r.bound + (r.relax ? p.at(*r.relax) : 0), r.strict ? -1 : 0};
    };
    // edge b -> a of weight w encodes T_a <= T_b + w
    std::size_t last_changed = static_cast<std::size_t>(-1);
    for (std::size_t pass = 0; pass <= nodes; ++pass) {
        last_changed = static_cast<std::size_t>(-1);
        for (std::size_t k = 0; k < sys.rows.size(); ++k) {
            const auto& r = sys.rows[k];
            const Weight cand = dist[r.b] + weight(r);
            if (cand < dist[r.a]) {
                dist[r.a] = cand;
                pred[r.a] = k;
                last_changed = r.a;
            }
        }
        if (last_changed == static_cast<std::size_t>(-1)) break;
    }

    FeasibilityResult out;
    if (last_changed == static_cast<std::size_t>(-1)) {
        out.feasible = true;
        // T_j = value_j + strict_j * eps with eps = 1/(nodes+1) satisfies every row
        const auto den = static_cast<std::int64_t>(nodes + 1);
        auto scaled = [&](std::size_t j) { return dist[j].value * den + dist[j].strict; };
        for (std::size_t i = 0; i + 1 < nodes; ++i)
            out.delays.push_back(Rational::make(scaled(i + 1) - scaled(i), den));
        return out;
    }
    std::size_t v = last_changed;
    for (std::size_t k = 0; k < nodes; ++k) v = sys.rows[pred[v]].b;
    CycleCut cut;
    cut.coef.assign(sys.relax_vars.size(), 0);
    std::int64_t value = 0;
    bool strict = false;
    std::size_t u = v;
    do {
        const auto& r = sys.rows[pred[u]];
        value += r.bound;
        strict = strict || r.strict;
        if (r.relax) ++cut.coef[*r.relax];
        u = r.b;
    } while (u != v);
    // feasible around the cycle iff value + sum(coef*p) > 0, or >= 0 without strict rows
    cut.need = -value + (strict ? 1 : 0);
    out.cut = std::move(cut);
    return out;
}

inline bool feasible(const DifferenceSystem& sys, const std::vector<std::int64_t>& p) {
    return solve_difference_system(sys, p).feasible;
}

// ---------------------------------------------------------------------------
// Optimal relaxations
// ---------------------------------------------------------------------------

struct RelaxOutcome {
    RelaxationValuation valuation;
    std::int64_t cost = 0;
    std::vector<Rational> delays; // path-based methods only
    std::size_t verifier_calls = 0;
    std::size_t oracle_calls = 0;
};

namespace detail {

/// Least-sum p >= 0 satisfying every cut, by depth-first search with a
/// per-cut lower bound. Ties resolve to the lexicographically smallest p.
inline std::vector<std::int64_t> solve_cuts(const std::vector<CycleCut>& cuts, std::size_t dims) {
    std::vector<std::int64_t> best, cur(dims, 0);
    std::int64_t best_sum = std::numeric_limits<std::int64_t>::max();
    std::vector<std::int64_t> residual(cuts.size());
    for (std::size_t k = 0; k < cuts.size(); ++k) residual[k] = cuts[k].need;
    auto ceil_div = [](std::int64_t a, std::int64_t b) { return (a + b - 1) / b; };

    std::function<void(std::size_t, std::int64_t)> dfs = [&](std::size_t r, std::int64_t sum) {
        std::int64_t lower = 0;
        for (std::size_t k = 0; k < cuts.size(); ++k) {
            if (residual[k] <= 0) continue;
            std::int64_t coef = 0;
            for (std::size_t j = r; j < dims; ++j) coef = std::max(coef, cuts[k].coef[j]);
            if (coef == 0) return;
            lower = std::max(lower, ceil_div(residual[k], coef));
        }
        if (sum + lower >= best_sum) return;
        if (lower == 0) {
            best_sum = sum;
            best = cur;
            return;
        }
        std::int64_t upper = 0;
        for (std::size_t k = 0; k < cuts.size(); ++k)
            if (residual[k] > 0 && cuts[k].coef[r] > 0) upper = std::max(upper, ceil_div(residual[k], cuts[k].coef[r]));
        for (std::int64_t v = 0; v <= upper && sum + v < best_sum; ++v) {
            cur[r] = v;
            for (std::size_t k = 0; k < cuts.size(); ++k) residual[k] -= v * cuts[k].coef[r];
            dfs(r + 1, sum + v);
            for (std::size_t k = 0; k < cuts.size(); ++k) residual[k] += v * cuts[k].coef[r];
        }
        cur[r] = 0;
    };
    dfs(0, 0);
    return best;
}

inline bool reaches(const TimedAutomaton& ta, const VerifierLimits& limits, std::size_t& calls) {
    ++calls;
    const auto r = check_reachability(ta, limits);
    if (r.verdict == Verdict::Inconclusive) throw AnalysisError(ErrorKind::Inconclusive, "verifier inconclusive");
    if (r.verdict == Verdict::LimitExceeded) throw AnalysisError(ErrorKind::LimitExceeded, "verifier state limit exceeded");
    return r.verdict == Verdict::Reachable;
}

} // namespace detail

/// Least total integer relaxation of the `msr` atoms on `witness` that makes the
/// path realizable. Solved exactly by alternating a cut-covering search with the
/// negative-cycle oracle, which returns a new violated cut until p is feasible.
inline RelaxOutcome min_total_relaxation_milp(const TimedAutomaton& ta, const Reduction& msr, const WitnessPath& witness,
                                              const VerifierLimits& limits = {}) {
    const auto table = ConstraintTable::build(ta);
    const auto sys = build_difference_system(ta, witness, msr);
    const std::size_t d = sys.relax_vars.size();
    std::vector<CycleCut> cuts;
    std::vector<std::int64_t> p(d, 0);
    FeasibilityResult fr;
    for (;;) {
        fr = solve_difference_system(sys, p);
        if (fr.feasible) break;
        if (std::all_of(fr.cut->coef.begin(), fr.cut->coef.end(), [](std::int64_t c) { return c == 0; }))
            throw AnalysisError(ErrorKind::InfeasibleSystem, "path is unrealizable for every relaxation");
        cuts.push_back(std::move(*fr.cut));
        p = detail::solve_cuts(cuts, d);
        if (p.empty()) throw AnalysisError(ErrorKind::InfeasibleSystem, "relaxation cuts are unsatisfiable");
    }
    RelaxOutcome out;
    out.oracle_calls = cuts.size() + 1;
    for (auto id : to_ids(msr)) out.valuation[id] = RelaxAmount::finite(0);
    for (std::size_t r = 0; r < d; ++r) {
        out.valuation[sys.relax_vars[r]] = RelaxAmount::finite(p[r]);
        out.cost += p[r];
    }
    out.delays = std::move(fr.delays);
    if (!detail::reaches(apply_relaxation(ta, table, out.valuation), limits, out.verifier_calls))
        throw std::logic_error("relaxed model does not reach the targets along the realizable witness");
    return out;
}

/// Least total integer relaxation of the `msr` atoms that makes the targets
/// reachable (any path), by lattice search with the verifier as oracle.
inline RelaxOutcome min_total_relaxation_global(const TimedAutomaton& ta, const Reduction& msr,
                                                const VerifierLimits& limits = {}, std::size_t budget = 100000) {
    const auto table = ConstraintTable::build(ta);
    const auto ids = to_ids(msr);
    RelaxOutcome out;
    auto valuation = [&](const LatticePoint& v) {
        RelaxationValuation r;
        for (std::size_t i = 0; i < ids.size(); ++i) r[ids[i]] = RelaxAmount::finite(v[i]);
        return r;
    };
    auto oracle = [&](const LatticePoint& v) {
        return detail::reaches(apply_relaxation(ta, table, valuation(v)), limits, out.verifier_calls);
    };
    const std::int64_t uniform =
        gallop_threshold([&](std::int64_t u) { return oracle(LatticePoint(ids.size(), u)); });
    // an optimum never exceeds the cost of the uniform solution in any coordinate
    const LatticePoint bounds(ids.size(), uniform * static_cast<std::int64_t>(ids.size()));
    auto best = monotone_lattice_optimize(oracle, OptimizeMode::Minimize, bounds, budget);
    if (!best) throw AnalysisError(ErrorKind::NonMonotoneOracle, "uniform solution lost inside its box");
    out.valuation = valuation(best->point);
    out.cost = best->value;
    out.oracle_calls = best->oracle_calls;
    return out;
}

namespace detail {

/// Relaxation of the guarantee `mg` atoms by `v`, with everything else in the universe removed.
inline RelaxationValuation guarantee_valuation(const std::vector<ConstraintId>& mg_ids, const Reduction& removed,
                                               const LatticePoint& v) {
    RelaxationValuation r;
    for (auto id : to_ids(removed)) r[id] = RelaxAmount::removal();
    for (std::size_t i = 0; i < mg_ids.size(); ++i) r[mg_ids[i]] = RelaxAmount::finite(v[i]);
    return r;
}

inline void require_guarantee(const TimedAutomaton& ta, const ConstraintTable& table, const std::vector<ConstraintId>& ids,
                              const Reduction& removed, const VerifierLimits& limits, std::size_t& calls) {
    if (reaches(apply_relaxation(ta, table, guarantee_valuation(ids, removed, LatticePoint(ids.size(), 0))), limits, calls))
        throw AnalysisError(ErrorKind::AlreadyReachable, "the given constraints do not keep the targets unreachable");
    Reduction all = removed;
    for (auto id : ids) all.set(id.value);
    if (!reaches(apply_reduction(ta, table, all), limits, calls))
        throw AnalysisError(ErrorKind::NoStructuralPath, "targets stay unreachable with every constraint removed");
}

} // namespace detail

/// Largest total integer relaxation of the guarantee atoms keeping the targets
/// unreachable; constraints of `universe` outside `mg` are removed.
inline RelaxOutcome max_total_relaxation(const TimedAutomaton& ta, const Reduction& mg, const ConstraintSet& universe,
                                         const VerifierLimits& limits = {}, std::size_t budget = 100000) {
    const auto table = ConstraintTable::build(ta);
    const auto ids = to_ids(mg);
    const Reduction removed = universe - mg;
    RelaxOutcome out;
    detail::require_guarantee(ta, table, ids, removed, limits, out.verifier_calls);
    auto safe = [&](const LatticePoint& v) {
        return !detail::reaches(apply_relaxation(ta, table, detail::guarantee_valuation(ids, removed, v)), limits,
                                out.verifier_calls);
    };
    LatticePoint bounds(ids.size(), 0);
    for (std::size_t i = 0; i < ids.size(); ++i)
        bounds[i] = gallop_threshold([&](std::int64_t x) {
                        LatticePoint v(ids.size(), 0);
                        v[i] = x;
                        return !safe(v);
                    }) - 1;
    auto best = monotone_lattice_optimize(safe, OptimizeMode::Maximize, bounds, budget);
    if (!best) throw AnalysisError(ErrorKind::NonMonotoneOracle, "zero relaxation became unsafe");
    for (std::size_t i = 0; i < ids.size(); ++i) out.valuation[ids[i]] = RelaxAmount::finite(best->point[i]);
    out.cost = best->value;
    out.oracle_calls = best->oracle_calls;
    return out;
}

struct RobustnessResult {
    std::int64_t delta = 0;
    bool next_reaches = false; // relaxing by delta + 1 reaches the targets
    std::size_t verifier_calls = 0;
};

/// Largest integer delta such that relaxing every guarantee atom by delta keeps the targets unreachable.
inline RobustnessResult robustness_degree(const TimedAutomaton& ta, const Reduction& mg, const ConstraintSet& universe,
                                          const VerifierLimits& limits = {}) {
    const auto table = ConstraintTable::build(ta);
    const auto ids = to_ids(mg);
    const Reduction removed = universe - mg;
    RobustnessResult out;
    detail::require_guarantee(ta, table, ids, removed, limits, out.verifier_calls);
    auto reaches_at = [&](std::int64_t delta) {
        return detail::reaches(
            apply_relaxation(ta, table, detail::guarantee_valuation(ids, removed, LatticePoint(ids.size(), delta))),
            limits, out.verifier_calls);
    };
    out.delta = gallop_threshold(reaches_at) - 1;
    out.next_reaches = reaches_at(out.delta + 1);
    return out;
}

} // namespace tatune
