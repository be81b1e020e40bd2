#include "nugap/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace nugap {

AxisGrid make_axis_grid(double y_min, double y_max, std::size_t n) {
    if (!(y_min > 0.0) || !(y_min < y_max) || !std::isfinite(y_max)) {
        throw std::invalid_argument("make_axis_grid: bad range (need 0 < y_min < y_max)");
    }
    if (n < 64) {
        throw std::invalid_argument("make_axis_grid: bad range (need n >= 64)");
    }
    AxisGrid grid;
    grid.y_min = y_min;
    grid.y_max = y_max;
    grid.per_sign = n;

    std::vector<double> positive(n);
    const double log_lo = std::log(y_min);
    const double log_hi = std::log(y_max);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n - 1);
        positive[k] = std::exp(log_lo + t * (log_hi - log_lo));
    }
    positive.front() = y_min;
    positive.back() = y_max;
    // log spacing can round adjacent points together near the ends; nudge to
    // keep the grid strictly increasing
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (positive[k] <= positive[k - 1]) {
            positive[k] = std::nextafter(positive[k - 1], y_max);
        }
    }

    grid.points.resize(2 * n);
    for (std::size_t k = 0; k < n; ++k) {
        grid.points[k] = -positive[n - 1 - k];
        grid.points[n + k] = positive[k];
    }
    return grid;
}

CircleGrid make_circle_grid(double radius, std::size_t count) {
    if (!(radius > 0.0 && radius < 1.0)) {
        throw std::invalid_argument("make_circle_grid: bad range (need 0 < r < 1)");
    }
    if (count < 256) {
        throw std::invalid_argument("make_circle_grid: bad range (need count >= 256)");
    }
    CircleGrid grid;
    grid.radius = radius;
    grid.count = count;
    grid.thetas.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid.thetas[k] = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(count);
    }
    return grid;
}

unsigned thread_budget() {
    if (const char* env = std::getenv("NU_GAP_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end != env && parsed > 0) {
            return static_cast<unsigned>(parsed);
        }
        // 0 or malformed fall through to auto
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned budget = std::min<unsigned>(thread_budget(), 64);
    if (count == 0) return;
    if (budget <= 1 || count < 128) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(budget, (count + 127) / 128));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    }
    for (auto& t : threads) t.join();
}

namespace {

constexpr double kGolden = 0.6180339887498949;  // 1/phi

struct GridSamples {
    std::vector<std::optional<double>> values;
    std::size_t failures = 0;
};

GridSamples evaluate_grid(const RealFn& f, const AxisGrid& grid) {
    GridSamples out;
    out.values.assign(grid.points.size(), std::nullopt);
    parallel_for(grid.points.size(), [&](std::size_t i) {
        auto v = f(grid.points[i]);
        if (v && std::isfinite(*v)) {
            out.values[i] = *v;
        }
    });
    for (const auto& v : out.values) {
        if (!v) ++out.failures;
    }
    const std::size_t total = out.values.size();
    if (out.failures == total) {
        throw SweepError(SweepError::Kind::all_points_failed,
                         "adaptive sweep: all contour samples failed");
    }
    if (static_cast<double>(out.failures) > 0.01 * static_cast<double>(total)) {
        throw SweepError(SweepError::Kind::excessive_failures,
                         "adaptive sweep: " + std::to_string(out.failures) + " of " +
                             std::to_string(total) + " contour samples failed (>1%)");
    }
    return out;
}

// Golden-section maximization of f on [lo, hi] in log-|y| coordinates,
// preserving the sign of the segment. Updates the incumbent with every
// successful probe; failures are skipped and counted.
void refine_bracket(const RealFn& f, double lo, double hi, double sign, int iters,
                    double& best_value, double& best_arg, std::size_t& failures,
                    std::size_t& samples) {
    if (!(lo > 0.0) || !(hi > lo) || iters <= 0) return;
    double a = std::log(lo);
    double b = std::log(hi);
    auto probe = [&](double t) -> double {
        const double y = sign * std::exp(t);
        ++samples;
        auto v = f(y);
        if (!v || !std::isfinite(*v)) {
            ++failures;
            return -std::numeric_limits<double>::infinity();
        }
        if (*v > best_value) {
            best_value = *v;
            best_arg = y;
        }
        return *v;
    };
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = probe(x1);
    double f2 = probe(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = probe(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = probe(x1);
        }
    }
}

SupEstimate sup_impl(const RealFn& f, const AxisGrid& grid, int iters) {
    const GridSamples samples = evaluate_grid(f, grid);
    const auto& vals = samples.values;
    const auto& ys = grid.points;
    const std::size_t n = vals.size();

    SupEstimate est;
    est.samples = n;
    est.failures = samples.failures;
    est.refine_depth = std::max(iters, 0);

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (vals[i] && *vals[i] > best) {
            best = *vals[i];
            best_idx = i;
        }
    }
    est.value = best;
    est.arg = ys[best_idx];

    // local maxima of the sampled values, segment-wise (negative then
    // positive sign), missing samples treated as absent neighbors
    struct Candidate {
        double value;
        std::size_t index;
    };
    std::vector<Candidate> candidates;
    const std::size_t seg = grid.per_sign;
    for (std::size_t i = 0; i < n; ++i) {
        if (!vals[i]) continue;
        const std::size_t seg_begin = i < seg ? 0 : seg;
        const std::size_t seg_end = i < seg ? seg : n;
        const double v = *vals[i];
        bool is_max = true;
        if (i > seg_begin && vals[i - 1] && *vals[i - 1] > v) is_max = false;
        if (i + 1 < seg_end && vals[i + 1] && *vals[i + 1] > v) is_max = false;
        if (is_max) candidates.push_back({v, i});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.index < b.index;
    });
    if (candidates.size() > 8) candidates.resize(8);

    for (const auto& c : candidates) {
        const std::size_t i = c.index;
        const std::size_t seg_begin = i < seg ? 0 : seg;
        const std::size_t seg_end = i < seg ? seg : n;
        const std::size_t lo_idx = i > seg_begin ? i - 1 : i;
        const std::size_t hi_idx = i + 1 < seg_end ? i + 1 : i;
        const double abs_lo = std::min(std::abs(ys[lo_idx]), std::abs(ys[hi_idx]));
        const double abs_hi = std::max(std::abs(ys[lo_idx]), std::abs(ys[hi_idx]));
        const double sign = ys[i] < 0.0 ? -1.0 : 1.0;
        refine_bracket(f, abs_lo, abs_hi, sign, iters, est.value, est.arg, est.failures,
                       est.samples);
    }

    const double mag = std::abs(est.arg);
    est.at_contour_end =
        mag <= grid.y_min * (1.0 + 1e-9) || mag >= grid.y_max * (1.0 - 1e-9);
    return est;
}

}  // namespace

SupEstimate adaptive_sup(const RealFn& f, const AxisGrid& grid, int iters) {
    return sup_impl(f, grid, iters);
}

SupEstimate adaptive_inf(const RealFn& f, const AxisGrid& grid, int iters) {
    RealFn negated = [&f](double y) -> std::optional<double> {
        auto v = f(y);
        if (!v) return std::nullopt;
        return -*v;
    };
    SupEstimate est = sup_impl(negated, grid, iters);
    est.value = -est.value;
    return est;
}

}  // namespace nugap
