#include "nugap/winding.hpp"

#include <algorithm>
#include <cmath>

namespace nugap {

const char* to_cstring(WindingStatus status) {
    switch (status) {
        case WindingStatus::ok: return "ok";
        case WindingStatus::zero_on_contour: return "zero-on-contour";
        case WindingStatus::unwrap_failed: return "unwrap-failed";
        case WindingStatus::eval_failed: return "eval-failed";
    }
    return "unknown";
}

double invertibility_tolerance(double max_mod) {
    return std::max(1e-9, 1e-6 * max_mod);
}

namespace {

constexpr int kMaxBisectionDepth = 20;
constexpr double kMaxPhaseStep = M_PI / 2.0;
constexpr double kWindingResidualLimit = 0.01;

struct UnwrapState {
    const DiscFn* f = nullptr;
    double radius = 0.0;
    double min_mod = std::numeric_limits<double>::infinity();
    double max_mod = 0.0;
    std::size_t samples = 0;
    WindingStatus status = WindingStatus::ok;
};

// Net phase increment from (theta_a, fa) to (theta_b, fb), bisecting while a
// single step exceeds pi/2. Sets state.status on failure and returns 0.
double phase_step(UnwrapState& state, double theta_a, Complex fa, double theta_b, Complex fb,
                  int depth) {
    const double d_phi = std::remainder(std::arg(fb) - std::arg(fa), 2.0 * M_PI);
    if (std::abs(d_phi) <= kMaxPhaseStep) {
        return d_phi;
    }
    if (depth >= kMaxBisectionDepth) {
        state.status = WindingStatus::unwrap_failed;
        return 0.0;
    }
    const double theta_m = 0.5 * (theta_a + theta_b);
    const Complex z = std::polar(state.radius, theta_m);
    auto fm = (*state.f)(z);
    ++state.samples;
    if (!fm.ok()) {
        state.status = WindingStatus::eval_failed;
        return 0.0;
    }
    const double mod = std::abs(fm.value);
    state.min_mod = std::min(state.min_mod, mod);
    state.max_mod = std::max(state.max_mod, mod);
    if (mod < invertibility_tolerance(state.max_mod)) {
        state.status = WindingStatus::zero_on_contour;
        return 0.0;
    }
    const double left = phase_step(state, theta_a, fa, theta_m, fm.value, depth + 1);
    if (state.status != WindingStatus::ok) return 0.0;
    const double right = phase_step(state, theta_m, fm.value, theta_b, fb, depth + 1);
    if (state.status != WindingStatus::ok) return 0.0;
    return left + right;
}

struct CircleSamples {
    std::vector<Complex> values;
    double min_mod = std::numeric_limits<double>::infinity();
    double max_mod = 0.0;
    double min_re = std::numeric_limits<double>::infinity();
    bool eval_ok = true;
};

CircleSamples evaluate_circle(const DiscFn& f, const CircleGrid& grid) {
    CircleSamples out;
    out.values.assign(grid.count, Complex{});
    std::vector<char> ok(grid.count, 0);
    parallel_for(grid.count, [&](std::size_t i) {
        auto v = f(std::polar(grid.radius, grid.thetas[i]));
        if (v.ok()) {
            out.values[i] = v.value;
            ok[i] = 1;
        }
    });
    for (std::size_t i = 0; i < grid.count; ++i) {
        if (!ok[i]) {
            out.eval_ok = false;
            continue;
        }
        const double mod = std::abs(out.values[i]);
        out.min_mod = std::min(out.min_mod, mod);
        out.max_mod = std::max(out.max_mod, mod);
        out.min_re = std::min(out.min_re, out.values[i].real());
    }
    return out;
}

CircleWinding unwrap_circle(const DiscFn& f, const CircleGrid& grid,
                            const CircleSamples& samples) {
    CircleWinding result;
    result.samples = grid.count;
    result.min_mod = samples.min_mod;
    result.max_mod = samples.max_mod;
    if (!samples.eval_ok) {
        result.status = WindingStatus::eval_failed;
        return result;
    }
    if (samples.min_mod < invertibility_tolerance(samples.max_mod)) {
        result.status = WindingStatus::zero_on_contour;
        return result;
    }

    UnwrapState state;
    state.f = &f;
    state.radius = grid.radius;
    state.min_mod = samples.min_mod;
    state.max_mod = samples.max_mod;

    double total = 0.0;
    const std::size_t n = grid.count;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t next = (k + 1) % n;
        const double theta_b = next == 0 ? 2.0 * M_PI : grid.thetas[next];
        total += phase_step(state, grid.thetas[k], samples.values[k], theta_b,
                            samples.values[next], 0);
        if (state.status != WindingStatus::ok) {
            result.status = state.status;
            result.min_mod = state.min_mod;
            result.max_mod = state.max_mod;
            result.samples += state.samples;
            return result;
        }
    }
    result.min_mod = state.min_mod;
    result.max_mod = state.max_mod;
    result.samples += state.samples;

    const double turns = total / (2.0 * M_PI);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) >= kWindingResidualLimit) {
        result.status = WindingStatus::unwrap_failed;
        return result;
    }
    result.winding = static_cast<int>(rounded);
    return result;
}

}  // namespace

CircleWinding winding_on_circle(const DiscFn& f, double r, std::size_t n) {
    if (!(r > 0.0 && r < 1.0)) {
        throw std::invalid_argument("winding_on_circle: radius must lie in (0, 1)");
    }
    if (n < 16) {
        throw std::invalid_argument("winding_on_circle: need at least 16 samples");
    }
    CircleGrid grid;
    grid.radius = r;
    grid.count = n;
    grid.thetas.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        grid.thetas[k] = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n);
    }
    return unwrap_circle(f, grid, evaluate_circle(f, grid));
}

WindingReport index_of_function(const DiscFn& g, const ContourConfig& cfg) {
    if (cfg.radii.size() < 2) {
        throw std::invalid_argument("index_of_function: need at least two radii");
    }
    std::vector<double> radii = cfg.radii;
    std::sort(radii.begin(), radii.end());
    for (double r : radii) {
        if (!(r > 0.0 && r < 1.0)) {
            throw std::invalid_argument("index_of_function: radii must lie in (0, 1)");
        }
    }

    WindingReport report;
    for (double r : radii) {
        const CircleGrid grid = make_circle_grid(r, cfg.circle_n);
        const CircleSamples samples = evaluate_circle(g, grid);

        RadiusResult rr;
        rr.radius = r;
        rr.min_mod = samples.min_mod;
        rr.max_mod = samples.max_mod;

        const double tol = invertibility_tolerance(samples.max_mod);
        if (samples.eval_ok && samples.min_re > 0.0 && samples.min_mod >= tol) {
            // positivity shortcut: values confined to the right half-plane
            // cannot encircle the origin
            rr.winding = 0;
            rr.status = WindingStatus::ok;
            rr.positivity_fast_path = true;
        } else {
            const CircleWinding cw = unwrap_circle(g, grid, samples);
            rr.winding = cw.winding;
            rr.min_mod = cw.min_mod;
            rr.max_mod = cw.max_mod;
            rr.status = cw.status;
        }
        report.per_radius.push_back(rr);
    }

    const RadiusResult& largest = report.per_radius.back();
    const RadiusResult& second = report.per_radius[report.per_radius.size() - 2];

    report.invertible = largest.status != WindingStatus::eval_failed &&
                        largest.min_mod >= invertibility_tolerance(largest.max_mod);
    report.stabilized = largest.winding.has_value() && second.winding.has_value() &&
                        *largest.winding == *second.winding &&
                        largest.min_mod >= invertibility_tolerance(largest.max_mod) &&
                        second.min_mod >= invertibility_tolerance(second.max_mod);
    if (report.stabilized) {
        report.final_index = *largest.winding;
    }
    return report;
}

WindingReport index_of_pair(const Factorization& f1, const Factorization& f2,
                            const ContourConfig& cfg) {
    DiscFn g = [&f1, &f2](Complex z) -> EvalOutcome {
        auto s = mobius_to_halfplane(z);
        if (!s.ok()) return s;
        auto n1 = f1.n(s.value);
        if (!n1.ok()) return n1;
        auto n2 = f2.n(s.value);
        if (!n2.ok()) return n2;
        auto d1 = f1.d(s.value);
        if (!d1.ok()) return d1;
        auto d2 = f2.d(s.value);
        if (!d2.ok()) return d2;
        return classify_value(std::conj(n1.value) * n2.value +
                              std::conj(d1.value) * d2.value);
    };
    return index_of_function(g, cfg);
}

nlohmann::ordered_json to_json(const WindingReport& report) {
    nlohmann::ordered_json radii = nlohmann::ordered_json::array();
    nlohmann::ordered_json windings = nlohmann::ordered_json::array();
    nlohmann::ordered_json min_mods = nlohmann::ordered_json::array();
    for (const auto& rr : report.per_radius) {
        radii.push_back(rr.radius);
        if (rr.winding) {
            windings.push_back(*rr.winding);
        } else {
            windings.push_back(nullptr);
        }
        min_mods.push_back(rr.min_mod);
    }
    nlohmann::ordered_json j;
    j["radii"] = radii;
    j["windings"] = windings;
    j["min_mods"] = min_mods;
    j["stabilized"] = report.stabilized;
    if (report.final_index) {
        j["index"] = *report.final_index;
    } else {
        j["index"] = nullptr;
    }
    j["invertible"] = report.invertible;
    return j;
}

}  // namespace nugap
