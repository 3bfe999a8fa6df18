#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>

namespace tatune {

/// Upper bound `(value, <)` or `(value, <=)`, or +inf.
/// Ordered so that (m,<) < (m,<=) < (m+1,<).
class Bound {
public:
    constexpr Bound() = default;
    constexpr Bound(std::int64_t value, bool strict) : value_(value), strict_(strict) {}

    static constexpr Bound infinity() {
        Bound b;
        b.infinite_ = true;
        return b;
    }
    static constexpr Bound le(std::int64_t v) { return {v, false}; }
    static constexpr Bound lt(std::int64_t v) { return {v, true}; }
    static constexpr Bound zero() { return {0, false}; }

    constexpr bool is_infinite() const { return infinite_; }
    constexpr std::int64_t value() const { return value_; }
    constexpr bool strict() const { return strict_; }

    friend constexpr Bound operator+(Bound a, Bound b) {
        if (a.infinite_ || b.infinite_) return infinity();
        return {a.value_ + b.value_, a.strict_ || b.strict_};
    }

    friend constexpr bool operator==(Bound a, Bound b) {
        if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
        return a.value_ == b.value_ && a.strict_ == b.strict_;
    }

    friend constexpr std::strong_ordering operator<=>(Bound a, Bound b) {
        if (a.infinite_ || b.infinite_) {
            if (a.infinite_ && b.infinite_) return std::strong_ordering::equal;
            return a.infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
        }
        if (a.value_ != b.value_) return a.value_ <=> b.value_;
        // strict is the tighter bound
        return static_cast<int>(!a.strict_) <=> static_cast<int>(!b.strict_);
    }

    std::string str() const {
        if (infinite_) return "<inf";
        return std::string(strict_ ? "<" : "<=") + std::to_string(value_);
    }

private:
    std::int64_t value_ = 0;
    bool strict_ = false;
    bool infinite_ = false;
};

inline std::ostream& operator<<(std::ostream& os, Bound b) { return os << b.str(); }

} // namespace tatune
