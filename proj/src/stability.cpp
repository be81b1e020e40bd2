#include "nugap/stability.hpp"

#include <algorithm>
#include <cmath>

namespace nugap {

namespace {

EvalOutcome loop_denominator(const Factorization& plant, const Factorization& controller,
                             Complex s) {
    auto n_p = plant.n(s);
    if (!n_p.ok()) return n_p;
    auto d_p = plant.d(s);
    if (!d_p.ok()) return d_p;
    auto n_c = controller.n(s);
    if (!n_c.ok()) return n_c;
    auto d_c = controller.d(s);
    if (!d_c.ok()) return d_c;
    return classify_value(d_p.value * d_c.value - n_p.value * n_c.value);
}

}  // namespace

LoopReport closed_loop_check(const Factorization& plant, const Factorization& controller,
                             const ContourConfig& cfg) {
    LoopReport report;

    DiscFn delta_on_disc = [&](Complex z) -> EvalOutcome {
        auto s = mobius_to_halfplane(z);
        if (!s.ok()) return s;
        return loop_denominator(plant, controller, s.value);
    };
    report.denominator_report = index_of_function(delta_on_disc, cfg);
    const WindingReport& den = report.denominator_report;
    const bool denominator_ok =
        den.invertible && den.stabilized && den.final_index && *den.final_index == 0;
    if (!den.invertible) {
        report.flags.push_back("loop-denominator-not-invertible");
    } else if (!den.stabilized) {
        report.flags.push_back("loop-denominator-index-unstable");
    } else if (*den.final_index != 0) {
        report.flags.push_back("loop-denominator-index-nonzero");
    }

    const AxisGrid grid = make_axis_grid(cfg.y_min, cfg.y_max, cfg.grid_n);
    // entries of the closed-loop matrix with denominators cleared:
    // 1/(1-pc), p/(1-pc), c/(1-pc), pc/(1-pc) up to sign
    enum Entry { np_nc, np_dc, nc_dp, dp_dc };
    bool entries_bounded = true;
    for (int entry = 0; entry < 4; ++entry) {
        RealFn fn = [&, entry](double y) -> std::optional<double> {
            const Complex s(0.0, y);
            auto delta = loop_denominator(plant, controller, s);
            if (!delta.ok()) return std::nullopt;
            if (std::abs(delta.value) < kPoleTolerance) return std::nullopt;
            auto n_p = plant.n(s);
            auto d_p = plant.d(s);
            auto n_c = controller.n(s);
            auto d_c = controller.d(s);
            if (!n_p.ok() || !d_p.ok() || !n_c.ok() || !d_c.ok()) return std::nullopt;
            Complex num;
            switch (entry) {
                case np_nc: num = n_p.value * n_c.value; break;
                case np_dc: num = n_p.value * d_c.value; break;
                case nc_dp: num = n_c.value * d_p.value; break;
                default: num = d_p.value * d_c.value; break;
            }
            const double mag = std::abs(num / delta.value);
            if (!std::isfinite(mag)) return std::nullopt;
            return mag;
        };
        const SupEstimate est = adaptive_sup(fn, grid, cfg.refine_iters);
        report.entry_sups[static_cast<std::size_t>(entry)] = est.value;
        const double failure_rate =
            static_cast<double>(est.failures) / static_cast<double>(est.samples);
        if (!(est.value < kEntrySupLimit) || failure_rate > 0.001) {
            entries_bounded = false;
        }
    }
    if (!entries_bounded) {
        report.flags.push_back("loop-entry-unbounded");
    }

    report.stable = denominator_ok && entries_bounded;
    return report;
}

std::vector<ProbeResult> robustness_probe(const Factorization& plant,
                                          const Factorization& controller,
                                          const std::vector<Factorization>& neighbors,
                                          const ContourConfig& cfg) {
    const LoopReport nominal = closed_loop_check(plant, controller, cfg);
    if (!nominal.stable) {
        throw std::runtime_error(
            "robustness_probe: the controller does not stabilize the nominal plant");
    }
    std::vector<ProbeResult> results;
    results.reserve(neighbors.size());
    for (const auto& neighbor : neighbors) {
        ProbeResult pr;
        pr.label = neighbor.label;
        pr.d_value = nu_metric(plant, neighbor, cfg).d_value;
        pr.stable = closed_loop_check(neighbor, controller, cfg).stable;
        results.push_back(std::move(pr));
    }
    std::stable_sort(results.begin(), results.end(),
                     [](const ProbeResult& a, const ProbeResult& b) {
                         return a.d_value < b.d_value;
                     });
    return results;
}

nlohmann::ordered_json to_json(const LoopReport& report) {
    nlohmann::ordered_json j;
    j["stable"] = report.stable;
    j["entry_sups"] = report.entry_sups;
    j["denominator"] = to_json(report.denominator_report);
    j["flags"] = report.flags;
    return j;
}

}  // namespace nugap
