#pragma once

#include "tatune/bound.hpp"
#include "tatune/model.hpp"

#include <cstddef>
#include <vector>

namespace tatune {

/// Difference bound matrix over clocks 1..n plus the zero reference 0.
/// Entry (i, j) bounds x_i - x_j. Kept canonical by every mutating operation.
class Zone {
public:
    /// The zone where every clock equals zero.
    static Zone zero(std::size_t clocks) {
        Zone z(clocks);
        for (auto& b : z.m_) b = Bound::zero();
        return z;
    }

    /// All nonnegative valuations.
    static Zone universal(std::size_t clocks) {
        Zone z(clocks);
        for (std::size_t i = 0; i <= clocks; ++i)
            for (std::size_t j = 0; j <= clocks; ++j)
                z.at(i, j) = (i == j || i == 0) ? Bound::zero() : Bound::infinity();
        return z;
    }

    std::size_t dim() const { return dim_; }
    bool is_empty() const { return empty_; }

    Bound get(std::size_t i, std::size_t j) const { return m_[i * dim_ + j]; }
    /// Raw write without closure; call canonicalize() afterwards.
    void set(std::size_t i, std::size_t j, Bound b) { at(i, j) = b; }

    /// Floyd-Warshall closure; marks the zone empty on a negative diagonal.
    void canonicalize() {
        if (empty_) return;
        for (std::size_t k = 0; k < dim_; ++k)
            for (std::size_t i = 0; i < dim_; ++i) {
                const Bound ik = get(i, k);
                if (ik.is_infinite()) continue;
                for (std::size_t j = 0; j < dim_; ++j) {
                    const Bound via = ik + get(k, j);
                    if (via < get(i, j)) at(i, j) = via;
                }
            }
        for (std::size_t i = 0; i < dim_; ++i)
            if (get(i, i) < Bound::zero()) {
                empty_ = true;
                return;
            }
    }

    /// Delay: drop the upper bounds of all clocks.
    void up() {
        if (empty_) return;
        for (std::size_t i = 1; i < dim_; ++i) at(i, 0) = Bound::infinity();
    }

    void reset(ClockId x) {
        if (empty_) return;
        for (std::size_t j = 0; j < dim_; ++j) {
            if (j == x) continue;
            at(x, j) = get(0, j);
            at(j, x) = get(j, 0);
        }
        at(x, x) = Bound::zero();
    }

    /// Intersects with x_i - x_j ≺ b, keeping the zone canonical (O(n^2)).
    void constrain(std::size_t i, std::size_t j, Bound b) {
        if (empty_ || !(b < get(i, j))) return;
        if (get(j, i) + b < Bound::zero()) {
            empty_ = true;
            return;
        }
        at(i, j) = b;
        for (std::size_t k = 0; k < dim_; ++k) {
            const Bound ki = get(k, i);
            const Bound kj_via_i = ki + b;
            for (std::size_t l = 0; l < dim_; ++l) {
                const Bound cand = kj_via_i + get(j, l);
                if (cand < get(k, l)) at(k, l) = cand;
            }
        }
    }

    void constrain(const SimpleConstraint& a) { constrain(a.lhs, a.rhs, a.as_bound()); }

    void constrain(const std::vector<SimpleConstraint>& atoms) {
        for (const auto& a : atoms) {
            constrain(a);
            if (empty_) return;
        }
    }

    /// Extrapolation w.r.t. per-clock maximal constants (index 0 unused).
    void extrapolate(const std::vector<std::int64_t>& max_const) {
        if (empty_) return;
        bool changed = false;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) {
                if (i == j) continue;
                const Bound b = get(i, j);
                if (b.is_infinite()) continue;
                const std::int64_t mi = i == 0 ? 0 : max_const[i];
                const std::int64_t mj = j == 0 ? 0 : max_const[j];
                if (Bound::le(mi) < b) {
                    at(i, j) = Bound::infinity();
                    changed = true;
                } else if (b < Bound::le(-mj)) {
                    at(i, j) = Bound::lt(-mj);
                    changed = true;
                }
            }
        if (changed) canonicalize();
    }

    /// Inclusion test on canonical zones.
    bool subset_of(const Zone& other) const {
        if (empty_) return true;
        if (other.empty_) return false;
        for (std::size_t k = 0; k < m_.size(); ++k)
            if (other.m_[k] < m_[k]) return false;
        return true;
    }

    bool contains_point(const std::vector<double>& v) const {
        if (empty_) return false;
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) {
                const Bound b = get(i, j);
                if (b.is_infinite()) continue;
                const double d = (i ? v[i - 1] : 0.0) - (j ? v[j - 1] : 0.0);
                if (b.strict() ? !(d < static_cast<double>(b.value())) : !(d <= static_cast<double>(b.value())))
                    return false;
            }
        return true;
    }

    friend bool operator==(const Zone& a, const Zone& b) {
        if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
        return a.m_ == b.m_;
    }

private:
    explicit Zone(std::size_t clocks) : dim_(clocks + 1), m_(dim_ * dim_) {}
    Bound& at(std::size_t i, std::size_t j) { return m_[i * dim_ + j]; }

    std::size_t dim_;
    std::vector<Bound> m_;
    bool empty_ = false;
};

} // namespace tatune
