#pragma once

// Closed-loop stability of a plant-controller pair via the loop denominator
// Delta = d_P d_C - n_P n_C, plus an empirical probe of the robustness ball
// around a stabilized plant.

#include <array>

#include <json.hpp>

#include "nugap/numetric.hpp"

namespace nugap {

struct LoopReport {
    bool stable = false;
    // boundary sups of n_P n_C/Delta, n_P d_C/Delta, n_C d_P/Delta, d_P d_C/Delta
    std::array<double, 4> entry_sups{};
    WindingReport denominator_report;
    std::vector<std::string> flags;
};

// Entry sups above this (or >0.1% grid failures) count as unbounded.
inline constexpr double kEntrySupLimit = 1e8;

LoopReport closed_loop_check(const Factorization& plant, const Factorization& controller,
                             const ContourConfig& cfg);

struct ProbeResult {
    double d_value = 0.0;
    bool stable = false;
    std::string label;
};

// For each neighbor: nu-metric distance from the nominal plant and the
// stability verdict under the same controller, sorted by distance. This is an
// empirical exhibit of the robustness ball, not a certified margin.
std::vector<ProbeResult> robustness_probe(const Factorization& plant,
                                          const Factorization& controller,
                                          const std::vector<Factorization>& neighbors,
                                          const ContourConfig& cfg);

nlohmann::ordered_json to_json(const LoopReport& report);

}  // namespace nugap
