#pragma once

#include "tatune/model.hpp"
#include "tatune/sat.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace tatune {

/// Known-insufficient / known-sufficient reductions as CNF over the tunable
/// universe, plus SAT-backed candidate queries.
///
/// Variable i of the CNF stands for the i-th universe constraint in id order.
class CnfStore {
public:
    explicit CnfStore(const ConstraintSet& universe) : universe_(universe) {
        for (auto i = universe.find_first(); i != ConstraintSet::npos; i = universe.find_next(i))
            ids_.push_back(static_cast<std::uint32_t>(i));
    }

    std::size_t universe_size() const { return ids_.size(); }
    const ConstraintSet& universe() const { return universe_; }
    std::size_t sat_calls() const { return sat_calls_; }

    /// Every subset of `red` becomes known insufficient.
    void mark_insufficient(const Reduction& red) {
        sat::Clause c;
        for (std::uint32_t v = 0; v < ids_.size(); ++v)
            if (!red.test(ids_[v])) c.push_back(sat::pos(v));
        clauses_i_.push_back(std::move(c));
        insufficient_.push_back(red & universe_);
    }

    /// Every superset of `red` becomes known sufficient.
    void mark_sufficient(const Reduction& red) {
        sat::Clause c;
        for (std::uint32_t v = 0; v < ids_.size(); ++v)
            if (red.test(ids_[v])) c.push_back(sat::neg(v));
        clauses_s_.push_back(std::move(c));
        sufficient_.push_back(red & universe_);
    }

    bool known_insufficient(const Reduction& red) const {
        for (const auto& g : insufficient_)
            if (red.is_subset_of(g)) return true;
        return false;
    }

    bool known_sufficient(const Reduction& red) const {
        for (const auto& g : sufficient_)
            if (g.is_subset_of(red)) return true;
        return false;
    }

    /// A size-k reduction outside every known-insufficient set.
    std::optional<Reduction> sseed_candidate(std::size_t k) { return query(&clauses_i_, nullptr, k); }

    /// A size-k reduction outside every known-sufficient set.
    std::optional<Reduction> iseed_candidate(std::size_t k) { return query(nullptr, &clauses_s_, k); }

    /// Any reduction that is neither known sufficient nor known insufficient.
    std::optional<Reduction> unexplored() { return query(&clauses_i_, &clauses_s_, std::nullopt); }

    const std::vector<Reduction>& insufficient_generators() const { return insufficient_; }
    const std::vector<Reduction>& sufficient_generators() const { return sufficient_; }

    /// Debug dump of the persistent clauses (positive ones first).
    void write_dimacs(std::ostream& os) const {
        std::vector<sat::Clause> all = clauses_i_;
        all.insert(all.end(), clauses_s_.begin(), clauses_s_.end());
        sat::write_dimacs(os, static_cast<std::uint32_t>(ids_.size()), all);
    }

private:
    ConstraintSet universe_;
    std::vector<std::uint32_t> ids_;
    std::vector<sat::Clause> clauses_i_;
    std::vector<sat::Clause> clauses_s_;
    std::vector<Reduction> insufficient_;
    std::vector<Reduction> sufficient_;
    std::size_t sat_calls_ = 0;

    std::optional<Reduction> query(const std::vector<sat::Clause>* a, const std::vector<sat::Clause>* b,
                                   std::optional<std::size_t> k) {
        ++sat_calls_;
        const auto n = static_cast<std::uint32_t>(ids_.size());
        if (k && *k > n) return std::nullopt;
        const std::uint32_t width = k ? static_cast<std::uint32_t>(*k) + 1 : 0;
        const bool counter = k && *k > 0 && *k < n;
        sat::Solver solver(n + (counter ? n * width : 0));
        if (a)
            for (const auto& c : *a) solver.add_clause(c);
        if (b)
            for (const auto& c : *b) solver.add_clause(c);
        if (k) {
            if (*k == 0) {
                for (std::uint32_t v = 0; v < n; ++v) solver.add_clause({sat::neg(v)});
            } else if (*k == n) {
                for (std::uint32_t v = 0; v < n; ++v) solver.add_clause({sat::pos(v)});
            } else {
                add_exactly(solver, n, static_cast<std::uint32_t>(*k));
            }
        }
        auto model = solver.solve();
        if (!model) return std::nullopt;
        Reduction red(universe_.size());
        for (std::uint32_t v = 0; v < n; ++v)
            if ((*model)[v]) red.set(ids_[v]);
        return red;
    }

    /// Sequential counter: s(i,j) <-> at least j of x_1..x_i are true, for j <= k+1.
    static void add_exactly(sat::Solver& solver, std::uint32_t n, std::uint32_t k) {
        const std::uint32_t width = k + 1;
        auto s = [&](std::uint32_t i, std::uint32_t j) { return n + (i - 1) * width + (j - 1); };
        auto x = [](std::uint32_t i) { return i - 1; };
        using sat::neg;
        using sat::pos;
        solver.add_clause({neg(x(1)), pos(s(1, 1))});
        solver.add_clause({neg(s(1, 1)), pos(x(1))});
        for (std::uint32_t j = 2; j <= width; ++j) solver.add_clause({neg(s(1, j))});
        for (std::uint32_t i = 2; i <= n; ++i) {
            for (std::uint32_t j = 1; j <= width; ++j) {
                solver.add_clause({neg(s(i - 1, j)), pos(s(i, j))});
                solver.add_clause({neg(s(i, j)), pos(s(i - 1, j)), pos(x(i))});
                if (j == 1) {
                    solver.add_clause({neg(x(i)), pos(s(i, 1))});
                } else {
                    solver.add_clause({neg(s(i - 1, j - 1)), neg(x(i)), pos(s(i, j))});
                    solver.add_clause({neg(s(i, j)), pos(s(i - 1, j)), pos(s(i - 1, j - 1))});
                }
            }
        }
        solver.add_clause({pos(s(n, k))});
        solver.add_clause({neg(s(n, width))});
    }
};

} // namespace tatune
