#pragma once

// Built-in plant families as coprime factor pairs over the half-plane Hardy
// algebra, with numerically stable evaluators, plus the Mobius transplant
// between half-plane and disc coordinates.

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nugap/types.hpp"

namespace nugap {

using Evaluator = std::function<EvalOutcome(Complex)>;

// A coprime factor pair (n, d) with p = n/d. Evaluators are pure and
// immutable after construction; freely shareable across threads.
struct Factorization {
    Evaluator n;
    Evaluator d;
    std::string label;
    bool claims_coprime = true;
};

struct PlantSpec {
    enum class Family { diffusion, delay_pole, delay_zero, retarded, expr };
    Family family{};
    double a = 0.0;      // diffusion / delay pole location
    double T = 0.0;      // delay
    double b = 0.0;      // zero location
    double delta = 0.0;  // retarded perturbation
    std::string n_text;  // expr family
    std::string d_text;
};

class SpecParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Textual forms: diffusion:a=0.5 | delay_pole:T=1,a=1 | delay_zero:T=1,a=1,b=0.1
//              | retarded:delta=0.05 | expr:n=<formula>;d=<formula>
PlantSpec parse_plant_spec(std::string_view text);
std::string to_spec_string(const PlantSpec& spec);

// Non-fatal advisories (e.g. a diffusion parameter within 1e-4 of its range
// boundary). Parameter-range violations throw from make_plant instead.
std::vector<std::string> plant_warnings(const PlantSpec& spec);

Factorization make_plant(const PlantSpec& spec);

// p_a = cosh(a sqrt(s)) / (sqrt(s) sinh(sqrt(s))), factored as
//   n_a = (1/(sqrt(s)+1)) sinh(a sqrt(s))/sinh(sqrt(s))
//   d_a = (sqrt(s)/(sqrt(s)+1)) tanh(a sqrt(s))
// evaluated in the z = sqrt(s) angular domain with exponential forms for
// large Re z and a series ratio across the removable singularity at z = 0.
Factorization diffusion_factorization(double a);

// p = e^{-sT} s/(s-a):  n = e^{-sT} s/(s+1), d = (s-a)/(s+1)
Factorization delay_pole_factorization(double T, double a);

// p = e^{-sT} (s-b)/(s-a):  n = e^{-sT} (s-b)/(s+1), d = (s-a)/(s+1)
Factorization delay_zero_factorization(double T, double a, double b);

// p_delta = 1/(s - (1+delta) e^{-s}):  n = 1/(s+1), d = (s-(1+delta)e^{-s})/(s+1)
Factorization retarded_factorization(double delta);

// User-supplied factor pair from expression text.
Factorization expr_factorization(std::string_view n_text, std::string_view d_text);

// s = (1+z)/(1-z) and z = (s-1)/(s+1); pole-hit at z = 1 resp. s = -1.
EvalOutcome mobius_to_halfplane(Complex z);
EvalOutcome mobius_to_disc(Complex s);

// A point carried in both coordinates (when defined).
struct MobiusPoint {
    std::optional<Complex> s;
    std::optional<Complex> z;
};
MobiusPoint mobius_point_from_halfplane(Complex s);
MobiusPoint mobius_point_from_disc(Complex z);

// Fixed interior probe set used by the factorization sanity checks
// (d not identically zero, n/d matches the plant).
std::array<Complex, 16> interior_probe_points();

}  // namespace nugap
