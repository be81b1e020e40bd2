#pragma once

// Winding numbers of boundary functions on disc circles and the limit index
// used by the nu-metric invertibility condition. The limit is certified by
// radius stabilization: the two largest configured radii must agree.

#include <optional>

#include <json.hpp>

#include "nugap/boundary.hpp"
#include "nugap/plants.hpp"
#include "nugap/types.hpp"

namespace nugap {

// Function on disc coordinates (callers compose with the Mobius map when the
// underlying data lives on the half-plane).
using DiscFn = std::function<EvalOutcome(Complex)>;

enum class WindingStatus {
    ok,
    zero_on_contour,  // min modulus below the invertibility tolerance
    unwrap_failed,    // phase step refinement exhausted or residual too large
    eval_failed,      // integrand failed on the contour
};

const char* to_cstring(WindingStatus status);

struct CircleWinding {
    std::optional<int> winding;
    double min_mod = 0.0;
    double max_mod = 0.0;
    WindingStatus status = WindingStatus::ok;
    std::size_t samples = 0;  // including bisection refinements
};

// min_mod must clear max(1e-9, 1e-6 * max_mod) for the winding to be defined.
double invertibility_tolerance(double max_mod);

// Phase-increment sum over n uniform samples of f on |z| = r, with angular
// bisection (depth <= 20) wherever a step exceeds pi/2.
CircleWinding winding_on_circle(const DiscFn& f, double r, std::size_t n);

struct RadiusResult {
    double radius = 0.0;
    std::optional<int> winding;
    double min_mod = 0.0;
    double max_mod = 0.0;
    WindingStatus status = WindingStatus::ok;
    bool positivity_fast_path = false;  // Re f > 0 everywhere, winding 0 assigned
};

struct WindingReport {
    std::vector<RadiusResult> per_radius;  // ascending radius
    bool stabilized = false;
    std::optional<int> final_index;
    bool invertible = false;
};

// Runs the circle schedule in cfg over g and aggregates the limit verdicts.
WindingReport index_of_function(const DiscFn& g, const ContourConfig& cfg);

// g(z) = conj(n1(s(z))) n2(s(z)) + conj(d1(s(z))) d2(s(z)) with s the Mobius
// transplant; the invertibility-plus-zero-index condition of the nu-metric.
WindingReport index_of_pair(const Factorization& f1, const Factorization& f2,
                            const ContourConfig& cfg);

nlohmann::ordered_json to_json(const WindingReport& report);

}  // namespace nugap
