#pragma once

// Pointwise chordal density, chordal distance kappa and the nu-metric d
// between two plants given by coprime factor pairs.

#include <optional>
#include <utility>

#include <json.hpp>

#include "nugap/boundary.hpp"
#include "nugap/plants.hpp"
#include "nugap/winding.hpp"

namespace nugap {

// |n1 d2 - n2 d1| / (sqrt(|n1|^2+|d1|^2) sqrt(|n2|^2+|d2|^2)) at s.
// Factor evaluation failures pass through; a vanishing denominator reports
// not_coprime_at_point.
RealOutcome kappa_pointwise(const Factorization& f1, const Factorization& f2, Complex s);

struct KappaResult {
    double value = 0.0;
    double argmax_y = 0.0;
    SupEstimate estimate;
    std::vector<std::pair<double, double>> sweep;  // (y, kappa), ascending y
};

// Boundary essential supremum of kappa_pointwise over the axis grid.
KappaResult kappa_distance(const Factorization& f1, const Factorization& f2,
                           const ContourConfig& cfg, bool want_sweep = false);

struct NuReport {
    double kappa = 0.0;
    double kappa_argmax_y = 0.0;
    WindingReport index_report;
    double d_value = 1.0;
    bool condition_held = false;
    double margin1 = 0.0;  // coprimeness margin of plant 1 (grid infimum)
    double margin2 = 0.0;
    std::optional<std::vector<std::pair<double, double>>> sweep;
    std::vector<std::string> flags;
    std::size_t eval_failures = 0;
};

// Two-branch nu-metric: d = kappa when the pair condition (invertible with
// stabilized index 0) holds, d = 1 otherwise.
NuReport nu_metric(const Factorization& f1, const Factorization& f2,
                   const ContourConfig& cfg, bool want_sweep = false);

struct PositivityResult {
    bool holds = false;
    double min_re = 0.0;
    double argmin_y = 0.0;
};

// Grid infimum of Re(conj(n1) n2 + conj(d1) d2) on the axis.
PositivityResult re_positivity_check(const Factorization& f1, const Factorization& f2,
                                     const ContourConfig& cfg);

// Grid infimum of |n|^2 + |d|^2 (the coprimeness margin diagnostic).
SupEstimate coprimeness_margin(const Factorization& f, const ContourConfig& cfg);

nlohmann::ordered_json to_json(const NuReport& report);

// Header y,kappa then one row per sample, shortest round-trip decimals.
void write_sweep_csv(std::ostream& out, const std::vector<std::pair<double, double>>& sweep);

}  // namespace nugap
