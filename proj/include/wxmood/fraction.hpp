#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace wxmood {

__extension__ using Int128 = __int128;

/// A ratio held as an integer count of billionths, so that thresholds such as
/// "more than 1% of N" or "at least 0.1% of N" are decided by exact integer
/// comparisons rather than floating-point products.
class Fraction {
public:
    static constexpr std::int64_t kDenominator = 1'000'000'000;

    constexpr Fraction() = default;

    static Fraction from_double(double value) {
        if (!std::isfinite(value) || value < 0.0 || value > 1.0)
            throw std::invalid_argument("fraction must lie in [0, 1]");
        return Fraction(static_cast<std::int64_t>(std::llround(value * kDenominator)));
    }

    constexpr std::int64_t numerator() const { return numerator_; }
    double value() const { return static_cast<double>(numerator_) / kDenominator; }

    /// floor(fraction * n)
    std::int64_t floor_of(std::int64_t n) const {
        return static_cast<std::int64_t>(static_cast<Int128>(n) * numerator_ / kDenominator);
    }

    /// ceil(fraction * n)
    std::int64_t ceil_of(std::int64_t n) const {
        const Int128 prod = static_cast<Int128>(n) * numerator_;
        return static_cast<std::int64_t>((prod + kDenominator - 1) / kDenominator);
    }

    /// count > fraction * n, decided exactly.
    bool exceeded_by(std::int64_t count, std::int64_t n) const {
        return static_cast<Int128>(count) * kDenominator > static_cast<Int128>(n) * numerator_;
    }

    friend constexpr bool operator==(Fraction, Fraction) = default;

private:
    constexpr explicit Fraction(std::int64_t numerator) : numerator_(numerator) {}

    std::int64_t numerator_ = 0;
};

} // namespace wxmood
