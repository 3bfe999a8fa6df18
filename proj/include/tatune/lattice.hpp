#pragma once

#include "tatune/error.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace tatune {

using LatticePoint = std::vector<std::int64_t>;
using LatticeOracle = std::function<bool(const LatticePoint&)>;

enum class OptimizeMode { Minimize, Maximize };

struct LatticeResult {
    LatticePoint point;
    std::int64_t value = 0;
    std::size_t oracle_calls = 0;
};

/// Galloping cap on per-coordinate bounds.
inline constexpr std::int64_t kGallopCap = std::int64_t{1} << 20;

/// Least v in [0, cap] with pred(v) true, for pred monotone nondecreasing in v.
/// Probes 0, 1, 2, 4, ... and then bisects. Throws BudgetExceeded past the cap.
inline std::int64_t gallop_threshold(const std::function<bool(std::int64_t)>& pred,
                                     std::int64_t cap = kGallopCap) {
    if (pred(0)) return 0;
    std::int64_t lo = 0; // pred(lo) false
    std::int64_t hi = 1;
    while (!pred(hi)) {
        lo = hi;
        if (hi >= cap) throw AnalysisError(ErrorKind::BudgetExceeded, "galloping bound exceeded 2^20");
        hi = std::min(hi * 2, cap);
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (pred(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

namespace detail {

inline bool leq(const LatticePoint& a, const LatticePoint& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

inline std::int64_t sum(const LatticePoint& v) {
    std::int64_t s = 0;
    for (auto x : v) s += x;
    return s;
}

/// Least-sum point of an upward-closed set inside [0, bounds].
///
/// Keeps the minimal corners of the region not yet excluded. The least-sum corner
/// is tested; if it fails it is raised coordinate-wise to a maximal failing point
/// q, whose down-set is then cut away by splitting every corner below q.
class UpwardSearch {
public:
    UpwardSearch(const LatticeOracle& oracle, const LatticePoint& bounds, std::size_t budget)
        : oracle_(oracle), bounds_(bounds), budget_(budget) {}

    std::optional<LatticeResult> run() {
        if (!test(bounds_)) return std::nullopt;
        std::vector<LatticePoint> corners{LatticePoint(bounds_.size(), 0)};
        for (;;) {
            auto best = std::min_element(corners.begin(), corners.end(), [](const auto& a, const auto& b) {
                const auto sa = sum(a), sb = sum(b);
                return sa != sb ? sa < sb : a < b;
            });
            const LatticePoint c = *best;
            if (test(c)) return LatticeResult{c, sum(c), calls_};
            const LatticePoint q = raise(c);
            std::vector<LatticePoint> next;
            for (const auto& k : corners) {
                if (!leq(k, q)) {
                    next.push_back(k);
                    continue;
                }
                for (std::size_t i = 0; i < k.size(); ++i) {
                    if (q[i] >= bounds_[i]) continue;
                    LatticePoint k2 = k;
                    k2[i] = q[i] + 1;
                    next.push_back(std::move(k2));
                }
            }
            corners = minimal(std::move(next));
            if (corners.empty()) throw AnalysisError(ErrorKind::NonMonotoneOracle, "feasible box top was excluded");
        }
    }

private:
    const LatticeOracle& oracle_;
    LatticePoint bounds_;
    std::size_t budget_;
    std::size_t calls_ = 0;
    std::vector<LatticePoint> known_true_, known_false_;

    bool test(const LatticePoint& v) {
        for (const auto& t : known_true_)
            if (leq(t, v)) return true;
        for (const auto& f : known_false_)
            if (leq(v, f)) return false;
        if (++calls_ > budget_) throw AnalysisError(ErrorKind::BudgetExceeded, "lattice search oracle budget exhausted");
        const bool ok = oracle_(v);
        (ok ? known_true_ : known_false_).push_back(v);
        return ok;
    }

    /// Maximal failing point above the failing point c (bisection per coordinate).
    LatticePoint raise(LatticePoint v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::int64_t lo = v[i], hi = bounds_[i] + 1; // test(lo) false; hi acts as true
            while (hi - lo > 1) {
                const std::int64_t mid = lo + (hi - lo) / 2;
                LatticePoint probe = v;
                probe[i] = mid;
                if (test(probe)) hi = mid;
                else lo = mid;
            }
            v[i] = lo;
        }
        return v;
    }

    static std::vector<LatticePoint> minimal(std::vector<LatticePoint> pts) {
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        std::vector<LatticePoint> out;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
                dominated = j != i && leq(pts[j], pts[i]);
            if (!dominated) out.push_back(pts[i]);
        }
        return out;
    }
};

} // namespace detail

/// Exact optimum of the coordinate sum over the box [0, bounds] for an oracle that
/// is monotone in the product order: upward closed when minimizing, downward closed
/// when maximizing. Returns nullopt when no box point satisfies the oracle.
/// Oracle answers implied by earlier ones (dominance) are not re-queried.
/// `budget` caps oracle calls.
inline std::optional<LatticeResult> monotone_lattice_optimize(const LatticeOracle& oracle, OptimizeMode mode,
                                                              const LatticePoint& bounds,
                                                              std::size_t budget = 100000) {
    if (mode == OptimizeMode::Minimize) return detail::UpwardSearch(oracle, bounds, budget).run();
    // maximize over v  <=>  minimize over w = bounds - v
    auto flip = [&](const LatticePoint& w) {
        LatticePoint v(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = bounds[i] - w[i];
        return v;
    };
    const LatticeOracle flipped = [&](const LatticePoint& w) { return oracle(flip(w)); };
    auto r = detail::UpwardSearch(flipped, bounds, budget).run();
    if (r) {
        r->point = flip(r->point);
        r->value = detail::sum(r->point);
    }
    return r;
}

} // namespace tatune
