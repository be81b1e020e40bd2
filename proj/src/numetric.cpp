#include "nugap/numetric.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace nugap {

namespace {

std::string shortest_decimal(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

RealFn kappa_axis_fn(const Factorization& f1, const Factorization& f2) {
    return [&f1, &f2](double y) -> std::optional<double> {
        auto k = kappa_pointwise(f1, f2, Complex(0.0, y));
        if (!k.ok()) return std::nullopt;
        return k.value;
    };
}

RealFn margin_axis_fn(const Factorization& f) {
    return [&f](double y) -> std::optional<double> {
        const Complex s(0.0, y);
        auto n = f.n(s);
        if (!n.ok()) return std::nullopt;
        auto d = f.d(s);
        if (!d.ok()) return std::nullopt;
        return std::norm(n.value) + std::norm(d.value);
    };
}

}  // namespace

RealOutcome kappa_pointwise(const Factorization& f1, const Factorization& f2, Complex s) {
    auto n1 = f1.n(s);
    if (!n1.ok()) return RealOutcome::failure(n1.status);
    auto d1 = f1.d(s);
    if (!d1.ok()) return RealOutcome::failure(d1.status);
    auto n2 = f2.n(s);
    if (!n2.ok()) return RealOutcome::failure(n2.status);
    auto d2 = f2.d(s);
    if (!d2.ok()) return RealOutcome::failure(d2.status);

    const double norm1 = std::sqrt(std::norm(n1.value) + std::norm(d1.value));
    const double norm2 = std::sqrt(std::norm(n2.value) + std::norm(d2.value));
    const double den = norm1 * norm2;
    if (den == 0.0 || !std::isfinite(den)) {
        return RealOutcome::failure(EvalStatus::not_coprime_at_point);
    }
    const double num = std::abs(n1.value * d2.value - n2.value * d1.value);
    const double value = num / den;
    if (!std::isfinite(value)) {
        return RealOutcome::failure(EvalStatus::invalid);
    }
    return RealOutcome::success(value);
}

KappaResult kappa_distance(const Factorization& f1, const Factorization& f2,
                           const ContourConfig& cfg, bool want_sweep) {
    const AxisGrid grid = make_axis_grid(cfg.y_min, cfg.y_max, cfg.grid_n);
    const RealFn fn = kappa_axis_fn(f1, f2);

    KappaResult result;
    result.estimate = adaptive_sup(fn, grid, cfg.refine_iters);
    result.value = result.estimate.value;
    result.argmax_y = result.estimate.arg;

    if (want_sweep) {
        result.sweep.assign(grid.points.size(), {0.0, 0.0});
        std::vector<char> keep(grid.points.size(), 0);
        parallel_for(grid.points.size(), [&](std::size_t i) {
            auto v = fn(grid.points[i]);
            if (v) {
                result.sweep[i] = {grid.points[i], *v};
                keep[i] = 1;
            }
        });
        std::vector<std::pair<double, double>> pruned;
        pruned.reserve(grid.points.size());
        for (std::size_t i = 0; i < grid.points.size(); ++i) {
            if (keep[i]) pruned.push_back(result.sweep[i]);
        }
        result.sweep = std::move(pruned);
    }
    return result;
}

SupEstimate coprimeness_margin(const Factorization& f, const ContourConfig& cfg) {
    const AxisGrid grid = make_axis_grid(cfg.y_min, cfg.y_max, cfg.grid_n);
    return adaptive_inf(margin_axis_fn(f), grid, cfg.refine_iters);
}

NuReport nu_metric(const Factorization& f1, const Factorization& f2,
                   const ContourConfig& cfg, bool want_sweep) {
    NuReport report;

    KappaResult kappa = kappa_distance(f1, f2, cfg, want_sweep);
    report.kappa = kappa.value;
    report.kappa_argmax_y = kappa.argmax_y;
    report.eval_failures += kappa.estimate.failures;
    if (want_sweep) {
        report.sweep = std::move(kappa.sweep);
    }
    if (kappa.estimate.at_contour_end) {
        report.flags.push_back("kappa-argmax-at-contour-end");
    }

    report.index_report = index_of_pair(f1, f2, cfg);
    const WindingReport& idx = report.index_report;
    report.condition_held = idx.invertible && idx.stabilized && idx.final_index &&
                            *idx.final_index == 0;
    report.d_value = report.condition_held ? report.kappa : 1.0;

    if (!idx.invertible) {
        report.flags.push_back("index-not-invertible");
    } else if (!idx.stabilized) {
        report.flags.push_back("index-unstable");
    } else if (*idx.final_index != 0) {
        report.flags.push_back("index-nonzero");
    }
    // the limit index is certified by agreement across the two largest radii,
    // not by a closed-form bound
    report.flags.push_back("index-radius-stabilization-heuristic");

    SupEstimate m1 = coprimeness_margin(f1, cfg);
    SupEstimate m2 = coprimeness_margin(f2, cfg);
    report.margin1 = m1.value;
    report.margin2 = m2.value;
    report.eval_failures += m1.failures + m2.failures;

    return report;
}

PositivityResult re_positivity_check(const Factorization& f1, const Factorization& f2,
                                     const ContourConfig& cfg) {
    const AxisGrid grid = make_axis_grid(cfg.y_min, cfg.y_max, cfg.grid_n);
    RealFn fn = [&f1, &f2](double y) -> std::optional<double> {
        const Complex s(0.0, y);
        auto n1 = f1.n(s);
        if (!n1.ok()) return std::nullopt;
        auto n2 = f2.n(s);
        if (!n2.ok()) return std::nullopt;
        auto d1 = f1.d(s);
        if (!d1.ok()) return std::nullopt;
        auto d2 = f2.d(s);
        if (!d2.ok()) return std::nullopt;
        return (std::conj(n1.value) * n2.value + std::conj(d1.value) * d2.value).real();
    };
    const SupEstimate est = adaptive_inf(fn, grid, cfg.refine_iters);
    PositivityResult result;
    result.min_re = est.value;
    result.argmin_y = est.arg;
    result.holds = est.value > 0.0;
    return result;
}

nlohmann::ordered_json to_json(const NuReport& report) {
    nlohmann::ordered_json j;
    j["kappa"] = report.kappa;
    j["kappa_argmax_y"] = report.kappa_argmax_y;
    j["d"] = report.d_value;
    j["condition_held"] = report.condition_held;
    j["index"] = to_json(report.index_report);
    j["margins"] = nlohmann::ordered_json{{"p1", report.margin1}, {"p2", report.margin2}};
    if (report.sweep) {
        nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
        for (const auto& [y, kappa] : *report.sweep) {
            sweep.push_back(nlohmann::ordered_json::array({y, kappa}));
        }
        j["sweep"] = std::move(sweep);
    }
    j["flags"] = report.flags;
    return j;
}

void write_sweep_csv(std::ostream& out,
                     const std::vector<std::pair<double, double>>& sweep) {
    out << "y,kappa\n";
    for (const auto& [y, kappa] : sweep) {
        out << shortest_decimal(y) << ',' << shortest_decimal(kappa) << '\n';
    }
}

}  // namespace nugap
