#pragma once

#include "tatune/error.hpp"
#include "tatune/model.hpp"
#include "tatune/symstore.hpp"
#include "tatune/verifier.hpp"

#include <chrono>
#include <cstddef>
#include <optional>
#include <set>
#include <vector>

namespace tatune {

struct EngineStats {
    std::size_t verifier_calls = 0;
    std::size_t sat_calls = 0;
    double wall_seconds = 0.0;
    /// Sizes of the successive MSRs (decreasing) or MIRs (increasing) of an outer scheme.
    std::vector<std::size_t> chain;
};

struct MsmpResult {
    Reduction result;
    EngineStats stats;
    /// Witness on apply_reduction(ta, result); only for MSR results.
    std::optional<WitnessPath> witness;
};

struct Enumeration {
    std::vector<Reduction> msrs;
    std::vector<Reduction> mirs;
    EngineStats stats;
};

struct ShrinkResult {
    Reduction msr;
    WitnessPath witness;
};

/// Owns the verifier handle and symbolic store for one analysis of one model.
class Engine {
public:
    Engine(const TimedAutomaton& ta, const ConstraintSet& universe, VerifierLimits limits = {})
        : ta_(ta), table_(ConstraintTable::build(ta)), limits_(limits), store_(universe) {
        table_.set_universe(universe);
    }

    const ConstraintTable& table() const { return table_; }
    const ConstraintSet& universe() const { return table_.universe(); }
    CnfStore& store() { return store_; }
    std::size_t verifier_calls() const { return verifier_calls_; }

    /// Witness on the reduced model, or nullopt when the targets stay unreachable.
    std::optional<WitnessPath> is_sufficient(const Reduction& red) {
        ++verifier_calls_;
        auto r = check_reachability(apply_reduction(ta_, table_, red), limits_);
        switch (r.verdict) {
        case Verdict::Reachable: return std::move(r.witness);
        case Verdict::Unreachable: return std::nullopt;
        case Verdict::Inconclusive:
            throw AnalysisError(ErrorKind::Inconclusive, "state budget exhausted on a model with diagonal constraints");
        case Verdict::LimitExceeded:
            throw AnalysisError(ErrorKind::LimitExceeded, "verifier state limit exceeded");
        }
        return std::nullopt;
    }

    /// Constraints of `red` whose owner occurs on `w`.
    Reduction reduction_core(const Reduction& red, const WitnessPath& w) const {
        std::set<LocationId> locs(w.locations.begin(), w.locations.end());
        std::set<EdgeId> edges(w.edges.begin(), w.edges.end());
        Reduction core(red.size());
        for (auto i = red.find_first(); i != Reduction::npos; i = red.find_next(i)) {
            const auto& en = table_.entry(ConstraintId{static_cast<std::uint32_t>(i)});
            const bool on_path = en.kind == OwnerKind::Location ? locs.count(en.owner) > 0
                                                               : edges.count(en.owner) > 0;
            if (on_path) core.set(i);
        }
        return core;
    }

    bool is_critical(const Reduction& red, ConstraintId c) {
        Reduction probe = red;
        probe.reset(c.value);
        return !is_sufficient(probe);
    }

    bool is_conflicting(const Reduction& red, ConstraintId c) {
        Reduction probe = red;
        probe.set(c.value);
        return is_sufficient(probe).has_value();
    }

    /// Shrinks a sufficient reduction to an MSR. Pass the witness when `red` is already verified.
    ShrinkResult shrink(const Reduction& red, std::optional<WitnessPath> witness = std::nullopt) {
        if (!witness) {
            witness = is_sufficient(red);
            if (!witness) throw AnalysisError(ErrorKind::InsufficientInput, "shrink needs a sufficient reduction");
        }
        Reduction work = red;
        Reduction critical(red.size());
        for (;;) {
            const Reduction open = work - critical;
            const auto c = open.find_first();
            if (c == Reduction::npos) break;
            Reduction probe = work;
            probe.reset(c);
            if (store_.known_insufficient(probe)) {
                critical.set(c);
                continue;
            }
            if (auto w = is_sufficient(probe)) {
                work = reduction_core(probe, *w);
                witness = std::move(w);
            } else {
                critical.set(c);
                store_.mark_insufficient(probe);
            }
        }
        return {work, std::move(*witness)};
    }

    /// Grows an insufficient reduction to an MIR.
    Reduction enlarge(const Reduction& red, bool verified = false) {
        if (!verified && (store_.known_sufficient(red) || is_sufficient(red)))
            throw AnalysisError(ErrorKind::SufficientInput, "enlarge needs an insufficient reduction");
        Reduction work = red;
        const Reduction outside = universe() - red;
        for (auto c = outside.find_first(); c != Reduction::npos; c = outside.find_next(c)) {
            Reduction probe = work;
            probe.set(c);
            if (store_.known_sufficient(probe)) continue;
            if (is_sufficient(probe)) {
                store_.mark_sufficient(probe);
            } else {
                work = std::move(probe);
            }
        }
        return work;
    }

    struct Seed {
        Reduction reduction;
        std::optional<WitnessPath> witness;
    };

    /// A sufficient reduction of size |M| - 1, or nullopt when none is left.
    std::optional<Seed> find_sseed(const Reduction& m) {
        const std::size_t size = m.count();
        if (size == 0) return std::nullopt;
        for (;;) {
            auto n = store_.sseed_candidate(size - 1);
            if (!n) return std::nullopt;
            if (store_.known_sufficient(*n)) return Seed{*n, std::nullopt};
            if (auto w = is_sufficient(*n)) return Seed{*n, std::move(w)};
            store_.mark_insufficient(enlarge(*n, true));
        }
    }

    /// An insufficient reduction of size |M| + 1, or nullopt when none is left.
    std::optional<Reduction> find_iseed(const Reduction& m) {
        const std::size_t size = m.count() + 1;
        if (size > store_.universe_size()) return std::nullopt;
        for (;;) {
            auto n = store_.iseed_candidate(size);
            if (!n) return std::nullopt;
            if (store_.known_insufficient(*n)) return n;
            auto w = is_sufficient(*n);
            if (!w) return n;
            store_.mark_sufficient(shrink(*n, std::move(w)).msr);
        }
    }

    /// Minimum-cardinality MSR over the universe.
    MsmpResult minimum_msr() {
        const auto start = std::chrono::steady_clock::now();
        const auto base_calls = verifier_calls_;
        const auto base_sat = store_.sat_calls();
        const Reduction none(table_.size());
        if (is_sufficient(none))
            throw AnalysisError(ErrorKind::AlreadyReachable, "targets are reachable on the unmodified model");
        store_.mark_insufficient(none);
        auto w = is_sufficient(universe());
        if (!w)
            throw AnalysisError(ErrorKind::NoStructuralPath,
                                "targets stay unreachable even with every tunable constraint removed");
        MsmpResult out;
        Seed seed{universe(), std::move(w)};
        for (;;) {
            auto shrunk = shrink(seed.reduction, std::move(seed.witness));
            out.result = shrunk.msr;
            out.witness = std::move(shrunk.witness);
            out.stats.chain.push_back(out.result.count());
            store_.mark_sufficient(out.result);
            for (auto c = out.result.find_first(); c != Reduction::npos; c = out.result.find_next(c)) {
                Reduction below = out.result;
                below.reset(c);
                if (!store_.known_insufficient(below)) store_.mark_insufficient(below);
            }
            auto next = find_sseed(out.result);
            if (!next) break;
            seed = std::move(*next);
        }
        finish(out.stats, start, base_calls, base_sat);
        return out;
    }

    /// Maximum MIR over the universe; its complement is a minimum MG.
    MsmpResult maximum_mir() {
        const auto start = std::chrono::steady_clock::now();
        const auto base_calls = verifier_calls_;
        const auto base_sat = store_.sat_calls();
        Reduction seed(table_.size());
        if (is_sufficient(seed))
            throw AnalysisError(ErrorKind::AlreadyReachable, "targets are reachable on the unmodified model");
        MsmpResult out;
        for (;;) {
            out.result = enlarge(seed, true);
            out.stats.chain.push_back(out.result.count());
            store_.mark_insufficient(out.result);
            const Reduction outside = universe() - out.result;
            for (auto c = outside.find_first(); c != Reduction::npos; c = outside.find_next(c)) {
                Reduction above = out.result;
                above.set(c);
                if (!store_.known_sufficient(above)) store_.mark_sufficient(above);
            }
            auto next = find_iseed(out.result);
            if (!next) break;
            seed = std::move(*next);
        }
        finish(out.stats, start, base_calls, base_sat);
        return out;
    }

    /// Minimum MG (complement of a maximum MIR); `stats.chain` holds the MIR sizes.
    MsmpResult minimum_mg() {
        auto r = maximum_mir();
        r.result = complement_guarantee(r.result, table_);
        return r;
    }

    /// Every MSR and every MIR of the universe; `budget` caps the number of seeds explored.
    Enumeration enumerate_all(std::size_t budget = 1'000'000) {
        const auto start = std::chrono::steady_clock::now();
        const auto base_calls = verifier_calls_;
        const auto base_sat = store_.sat_calls();
        Enumeration out;
        // Seeds come from a map blocked only by the MSRs/MIRs found so far;
        // store_ keeps every learned fact for the lazy checks.
        CnfStore map(universe());
        std::size_t rounds = 0;
        while (auto n = map.unexplored()) {
            if (++rounds > budget)
                throw AnalysisError(ErrorKind::BudgetExceeded, "enumeration budget exhausted");
            std::optional<WitnessPath> w;
            const bool sufficient = !store_.known_insufficient(*n) && (w = is_sufficient(*n)).has_value();
            if (sufficient) {
                auto m = shrink(*n, std::move(w)).msr;
                store_.mark_sufficient(m);
                map.mark_sufficient(m);
                out.msrs.push_back(std::move(m));
            } else {
                auto m = enlarge(*n, true);
                store_.mark_insufficient(m);
                map.mark_insufficient(m);
                out.mirs.push_back(std::move(m));
            }
        }
        finish(out.stats, start, base_calls, base_sat);
        out.stats.sat_calls += map.sat_calls();
        return out;
    }

private:
    TimedAutomaton ta_;
    ConstraintTable table_;
    VerifierLimits limits_;
    CnfStore store_;
    std::size_t verifier_calls_ = 0;

    void finish(EngineStats& stats, std::chrono::steady_clock::time_point start, std::size_t base_calls,
                std::size_t base_sat) const {
        stats.verifier_calls = verifier_calls_ - base_calls;
        stats.sat_calls = store_.sat_calls() - base_sat;
        stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

} // namespace tatune
