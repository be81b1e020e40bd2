#pragma once

// Evaluation contours (log-uniform imaginary-axis grids, disc circles) and
// adaptive supremum/infimum estimation of scalar functionals over them.

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nugap {

// Points cover both signs: -y_max..-y_min then y_min..y_max, ascending,
// log-uniform within each sign, endpoints exact. per_sign >= 64.
struct AxisGrid {
    double y_min = 0.0;
    double y_max = 0.0;
    std::size_t per_sign = 0;
    std::vector<double> points;
};

AxisGrid make_axis_grid(double y_min, double y_max, std::size_t n);

// Uniform angles on [0, 2pi), count >= 256.
struct CircleGrid {
    double radius = 0.0;
    std::size_t count = 0;
    std::vector<double> thetas;
};

CircleGrid make_circle_grid(double radius, std::size_t count);

struct SupEstimate {
    double value = 0.0;
    double arg = 0.0;          // location of the incumbent (y for axis grids)
    int refine_depth = 0;      // golden-section rounds performed
    std::size_t failures = 0;  // evaluation failures skipped
    std::size_t samples = 0;   // total evaluations attempted
    bool at_contour_end = false;  // incumbent within 1e-9 of y_min or y_max
};

// Scalar functional on the contour; std::nullopt marks a skipped failure.
using RealFn = std::function<std::optional<double>(double)>;

class SweepError : public std::runtime_error {
public:
    enum class Kind { all_points_failed, excessive_failures };
    SweepError(Kind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

// Grid scan plus `iters` golden-section rounds around the top 8 local maxima.
// The incumbent never drops below the best initial grid sample. Failures are
// skipped and counted; more than 1% failing (or all failing) raises
// SweepError. Deterministic for fixed inputs.
SupEstimate adaptive_sup(const RealFn& f, const AxisGrid& grid, int iters);
SupEstimate adaptive_inf(const RealFn& f, const AxisGrid& grid, int iters);

// Contour configuration shared by the kappa sweep and the winding schedule.
struct ContourConfig {
    double y_min = 1e-6;
    double y_max = 1e6;
    std::size_t grid_n = 4096;  // per sign
    int refine_iters = 40;
    std::vector<double> radii{0.9, 0.99, 0.999, 0.9999};
    std::size_t circle_n = 8192;
};

// Worker count: NU_GAP_THREADS caps parallelism (0 or unset = hardware).
unsigned thread_budget();

// Chunked parallel loop; body(i) must only touch state owned by index i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace nugap
