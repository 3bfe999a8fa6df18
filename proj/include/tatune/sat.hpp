#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

namespace tatune::sat {

/// Literal encoding: 2*var for the positive literal, 2*var+1 for the negation.
using Lit = std::uint32_t;

inline Lit pos(std::uint32_t var) { return var << 1; }
inline Lit neg(std::uint32_t var) { return (var << 1) | 1u; }
inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool is_neg(Lit l) { return (l & 1u) != 0; }
inline Lit negate(Lit l) { return l ^ 1u; }

using Clause = std::vector<Lit>;

inline void write_dimacs(std::ostream& os, std::uint32_t vars, const std::vector<Clause>& clauses) {
    os << "p cnf " << vars << " " << clauses.size() << "\n";
    for (const auto& c : clauses) {
        for (Lit l : c) os << (is_neg(l) ? "-" : "") << (var_of(l) + 1) << " ";
        os << "0\n";
    }
}

/// CDCL solver with two watched literals and first-UIP learning.
/// Decisions follow variable index order with the negative phase first, so
/// results depend only on the clause list.
class Solver {
public:
    explicit Solver(std::uint32_t vars)
        : value_(vars, kUnassigned), level_(vars, 0), reason_(vars, kNoReason), seen_(vars, 0),
          watches_(2 * static_cast<std::size_t>(vars)) {}

    std::uint32_t var_count() const { return static_cast<std::uint32_t>(value_.size()); }

    void add_clause(Clause c) {
        if (unsat_) return;
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        for (std::size_t i = 0; i + 1 < c.size(); ++i)
            if (c[i + 1] == negate(c[i])) return; // tautology
        if (c.empty()) {
            unsat_ = true;
            return;
        }
        if (c.size() == 1) {
            units_.push_back(c[0]);
            return;
        }
        attach(std::move(c));
    }

    /// Model as one bool per variable, or nullopt when unsatisfiable.
    std::optional<std::vector<bool>> solve() {
        if (unsat_) return std::nullopt;
        for (Lit u : units_) {
            const int v = lit_value(u);
            if (v == 0) return std::nullopt;
            if (v < 0) enqueue(u, kNoReason);
        }
        if (propagate() != kNoReason) return std::nullopt;
        std::uint32_t hint = 0;
        for (;;) {
            while (hint < var_count() && value_[hint] != kUnassigned) ++hint;
            if (hint == var_count()) break;
            trail_lim_.push_back(trail_.size());
            enqueue(neg(hint), kNoReason);
            for (;;) {
                const std::uint32_t conflict = propagate();
                if (conflict == kNoReason) break;
                if (trail_lim_.empty()) return std::nullopt;
                auto [learnt, back_level] = analyze(conflict);
                backtrack(back_level, hint);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNoReason);
                } else {
                    const Lit asserting = learnt[0];
                    const auto idx = attach(std::move(learnt));
                    enqueue(asserting, idx);
                }
            }
        }
        std::vector<bool> model(var_count());
        for (std::uint32_t v = 0; v < var_count(); ++v) model[v] = value_[v] == 1;
        return model;
    }

private:
    static constexpr std::int8_t kUnassigned = -1;
    static constexpr std::uint32_t kNoReason = static_cast<std::uint32_t>(-1);

    std::vector<Clause> clauses_;
    std::vector<Lit> units_;
    std::vector<std::int8_t> value_;
    std::vector<std::uint32_t> level_;
    std::vector<std::uint32_t> reason_;
    std::vector<std::uint8_t> seen_;
    std::vector<std::vector<std::uint32_t>> watches_;
    std::vector<Lit> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_ = 0;
    bool unsat_ = false;

    int lit_value(Lit l) const {
        const auto v = value_[var_of(l)];
        if (v == kUnassigned) return -1;
        return is_neg(l) ? 1 - v : v;
    }

    std::uint32_t attach(Clause c) {
        const auto idx = static_cast<std::uint32_t>(clauses_.size());
        watches_[negate(c[0])].push_back(idx);
        watches_[negate(c[1])].push_back(idx);
        clauses_.push_back(std::move(c));
        return idx;
    }

    void enqueue(Lit l, std::uint32_t reason) {
        const auto v = var_of(l);
        value_[v] = is_neg(l) ? 0 : 1;
        level_[v] = static_cast<std::uint32_t>(trail_lim_.size());
        reason_[v] = reason;
        trail_.push_back(l);
    }

    /// Returns the index of a conflicting clause or kNoReason.
    std::uint32_t propagate() {
        while (qhead_ < trail_.size()) {
            const Lit p = trail_[qhead_++];
            // clauses watching ¬p, registered under watches_[p]
            auto& ws = watches_[p];
            std::size_t keep = 0;
            for (std::size_t k = 0; k < ws.size(); ++k) {
                const std::uint32_t ci = ws[k];
                Clause& c = clauses_[ci];
                const Lit false_lit = negate(p);
                if (c[0] == false_lit) std::swap(c[0], c[1]);
                if (lit_value(c[0]) == 1) {
                    ws[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (std::size_t j = 2; j < c.size(); ++j)
                    if (lit_value(c[j]) != 0) {
                        std::swap(c[1], c[j]);
                        watches_[negate(c[1])].push_back(ci);
                        moved = true;
                        break;
                    }
                if (moved) continue;
                ws[keep++] = ci;
                if (lit_value(c[0]) == 0) {
                    for (std::size_t j = k + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
                    ws.resize(keep);
                    qhead_ = trail_.size();
                    return ci;
                }
                enqueue(c[0], ci);
            }
            ws.resize(keep);
        }
        return kNoReason;
    }

    std::pair<Clause, std::uint32_t> analyze(std::uint32_t conflict) {
        Clause learnt{0};
        const auto cur_level = static_cast<std::uint32_t>(trail_lim_.size());
        std::size_t pending = 0;
        std::size_t index = trail_.size();
        Lit p = 0;
        bool first = true;
        std::uint32_t ci = conflict;
        for (;;) {
            const Clause& c = clauses_[ci];
            for (std::size_t j = first ? 0 : 1; j < c.size(); ++j) {
                const auto v = var_of(c[j]);
                if (seen_[v] || level_[v] == 0) continue;
                seen_[v] = 1;
                if (level_[v] == cur_level) ++pending;
                else learnt.push_back(c[j]);
            }
            first = false;
            do p = trail_[--index];
            while (!seen_[var_of(p)]);
            seen_[var_of(p)] = 0;
            if (--pending == 0) break;
            ci = reason_[var_of(p)];
            // reason clauses keep their implied literal at position 0
        }
        learnt[0] = negate(p);
        std::uint32_t back = 0;
        std::size_t max_i = 1;
        for (std::size_t i = 1; i < learnt.size(); ++i) {
            seen_[var_of(learnt[i])] = 0;
            if (level_[var_of(learnt[i])] > back) {
                back = level_[var_of(learnt[i])];
                max_i = i;
            }
        }
        if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
        return {std::move(learnt), back};
    }

    void backtrack(std::uint32_t level, std::uint32_t& hint) {
        if (trail_lim_.size() <= level) return;
        const std::size_t stop = trail_lim_[level];
        for (std::size_t i = trail_.size(); i > stop; --i) {
            const auto v = var_of(trail_[i - 1]);
            value_[v] = kUnassigned;
            reason_[v] = kNoReason;
            if (v < hint) hint = v;
        }
        trail_.resize(stop);
        trail_lim_.resize(level);
        qhead_ = trail_.size();
    }
};

} // namespace tatune::sat
