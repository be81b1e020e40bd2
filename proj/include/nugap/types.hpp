#pragma once

#include <cmath>
#include <complex>
#include <utility>

namespace nugap {

using Complex = std::complex<double>;

// Shared failure vocabulary for every evaluation path in the library.
// expr evaluation produces the first four; kappa_pointwise adds the last.
enum class EvalStatus {
    ok,
    pole_hit,
    branch_cut_hit,
    overflow,
    invalid,
    not_coprime_at_point,
};

const char* to_cstring(EvalStatus status);

template <typename T>
struct Outcome {
    T value{};
    EvalStatus status = EvalStatus::ok;

    bool ok() const { return status == EvalStatus::ok; }

    static Outcome success(T v) { return Outcome{std::move(v), EvalStatus::ok}; }
    static Outcome failure(EvalStatus st) { return Outcome{T{}, st}; }
};

using EvalOutcome = Outcome<Complex>;
using RealOutcome = Outcome<double>;

// Denominators with modulus below this are reported as pole hits.
inline constexpr double kPoleTolerance = 1e-300;
// Intermediates with modulus above this are reported as overflow.
inline constexpr double kOverflowLimit = 1e150;

// Classify a computed value: NaN components -> invalid, modulus beyond the
// overflow limit (or infinite) -> overflow, otherwise ok.
inline EvalOutcome classify_value(Complex v) {
    const double re = v.real();
    const double im = v.imag();
    if (std::isnan(re) || std::isnan(im)) {
        return EvalOutcome::failure(EvalStatus::invalid);
    }
    if (!std::isfinite(re) || !std::isfinite(im) || std::hypot(re, im) > kOverflowLimit) {
        return EvalOutcome::failure(EvalStatus::overflow);
    }
    return EvalOutcome::success(v);
}

}  // namespace nugap
