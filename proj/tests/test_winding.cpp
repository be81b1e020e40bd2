#include <doctest.h>

#include <cmath>

#include "nugap/winding.hpp"

using namespace nugap;

namespace {

DiscFn poly(std::vector<Complex> coeffs) {
    // coefficients low to high
    return [coeffs](Complex z) {
        Complex acc(0.0, 0.0);
        for (std::size_t k = coeffs.size(); k-- > 0;) {
            acc = acc * z + coeffs[k];
        }
        return classify_value(acc);
    };
}

}  // namespace

TEST_CASE("winding of elementary maps") {
    const DiscFn identity = poly({{0.0, 0.0}, {1.0, 0.0}});
    auto w = winding_on_circle(identity, 0.9, 512);
    REQUIRE(w.winding.has_value());
    CHECK(*w.winding == 1);
    CHECK(w.min_mod == doctest::Approx(0.9));
    CHECK(w.max_mod == doctest::Approx(0.9));

    // roots of z^3 + 1e-6 sit at modulus 0.01, well inside r = 0.99
    const DiscFn cubic = poly({{1e-6, 0.0}, {}, {}, {1.0, 0.0}});
    auto w3 = winding_on_circle(cubic, 0.99, 512);
    REQUIRE(w3.winding.has_value());
    CHECK(*w3.winding == 3);

    const DiscFn shifted = poly({{2.0, 0.0}, {1.0, 0.0}});
    auto w0 = winding_on_circle(shifted, 0.9, 512);
    REQUIRE(w0.winding.has_value());
    CHECK(*w0.winding == 0);
}

TEST_CASE("winding of z^n is exactly n for n in {-3..3}") {
    for (int n = -3; n <= 3; ++n) {
        const DiscFn f = [n](Complex z) { return classify_value(std::pow(z, n)); };
        auto w = winding_on_circle(f, 0.9, 1024);
        CAPTURE(n);
        REQUIRE(w.winding.has_value());
        CHECK(*w.winding == n);
    }
}

TEST_CASE("additivity: w(fg) = w(f) + w(g), including conjugate factors") {
    const DiscFn f = poly({{0.0, 0.0}, {1.0, 0.0}});            // z
    const DiscFn g = poly({{0.5, 0.0}, {}, {1.0, 0.0}});        // z^2 + 0.5
    const DiscFn h = [](Complex z) { return classify_value(std::conj(z)); };

    for (double r : {0.9, 0.99, 0.999}) {
        auto wf = winding_on_circle(f, r, 1024).winding;
        auto wg = winding_on_circle(g, r, 1024).winding;
        auto wh = winding_on_circle(h, r, 1024).winding;
        auto wfg = winding_on_circle(
            [&](Complex z) { return classify_value(z * (z * z + 0.5)); }, r, 1024).winding;
        auto wfh = winding_on_circle(
            [&](Complex z) { return classify_value(z * std::conj(z)); }, r, 1024).winding;
        REQUIRE(wf.has_value());
        REQUIRE(wg.has_value());
        REQUIRE(wh.has_value());
        REQUIRE(wfg.has_value());
        REQUIRE(wfh.has_value());
        CHECK(*wfg == *wf + *wg);
        CHECK(*wfh == *wf + *wh);
        CHECK(*wh == -1);
    }
}

TEST_CASE("conjugation flips the winding sign") {
    const DiscFn f = poly({{0.1, 0.0}, {}, {}, {1.0, 0.0}});  // z^3 + 0.1
    const DiscFn f_conj = [&f](Complex z) {
        auto v = f(z);
        if (!v.ok()) return v;
        return EvalOutcome::success(std::conj(v.value));
    };
    auto w = winding_on_circle(f, 0.9, 1024);
    auto wc = winding_on_circle(f_conj, 0.9, 1024);
    REQUIRE(w.winding.has_value());
    REQUIRE(wc.winding.has_value());
    CHECK(*w.winding == 3);
    CHECK(*wc.winding == -3);
}

TEST_CASE("winding is locally constant under small perturbations") {
    // f = z^3 has min modulus 0.729 on r = 0.9; a perturbation with sup
    // norm <= 1 scaled by eps < min_mod/2 cannot change the count
    const DiscFn base = poly({{}, {}, {}, {1.0, 0.0}});
    const double eps = 0.3;
    const DiscFn perturbed = [eps](Complex z) {
        const Complex h = (z * z + 0.3) / 1.3;  // sup norm 1 on the closed disc
        return classify_value(z * z * z + eps * h);
    };
    auto w = winding_on_circle(perturbed, 0.9, 1024);
    REQUIRE(w.winding.has_value());
    CHECK(*w.winding == 3);
    CHECK(winding_on_circle(base, 0.9, 1024).min_mod == doctest::Approx(0.729));
}

TEST_CASE("zero-free holomorphic functions have index 0, z - c has index 1") {
    ContourConfig cfg;
    cfg.circle_n = 2048;

    const DiscFn exp_of_bounded = [](Complex z) {
        return classify_value(std::exp(0.5 * z * z - 0.2 * z));
    };
    const WindingReport zero_free = index_of_function(exp_of_bounded, cfg);
    CHECK(zero_free.stabilized);
    CHECK(zero_free.invertible);
    REQUIRE(zero_free.final_index.has_value());
    CHECK(*zero_free.final_index == 0);

    const DiscFn affine = poly({{-0.5, 0.0}, {1.0, 0.0}});  // z - 0.5
    const WindingReport pole_inside = index_of_function(affine, cfg);
    CHECK(pole_inside.stabilized);
    CHECK(pole_inside.invertible);  // invertible in the annulus limit algebra
    REQUIRE(pole_inside.final_index.has_value());
    CHECK(*pole_inside.final_index == 1);  // hence not invertible in H-infinity
}

TEST_CASE("zero on the contour is rejected") {
    const DiscFn f = poly({{-0.9, 0.0}, {1.0, 0.0}});  // z - 0.9, zero at sample 0
    auto w = winding_on_circle(f, 0.9, 512);
    CHECK(!w.winding.has_value());
    CHECK(w.status == WindingStatus::zero_on_contour);
}

TEST_CASE("angular bisection resolves windings far above the sample rate") {
    // 87 turns across 16 base samples: the halving sequence of true phase
    // steps (34.2, 17.1, 8.5, 4.3, 2.1, 1.07 rad) stays clear of the 2*pi*k
    // aliasing windows until it drops below pi/2, so bisection is exact
    const DiscFn fast = [](Complex z) { return classify_value(std::pow(z / 0.5, 87)); };
    auto w = winding_on_circle(fast, 0.5, 16);
    REQUIRE(w.winding.has_value());
    CHECK(*w.winding == 87);
    CHECK(w.samples > 16);
}

TEST_CASE("phase unwrapping gives up after bounded refinement") {
    // K = 2^26/3: every dyadic halving of the sample spacing leaves the true
    // phase step at +-2*pi/3 (mod 2*pi), so no refinement depth suffices
    const DiscFn impossible = [](Complex z) {
        const double k = 67108864.0 / 3.0;
        return classify_value(std::polar(1.0, k * std::arg(z)));
    };
    auto w = winding_on_circle(impossible, 0.9, 16);
    CHECK(!w.winding.has_value());
    CHECK(w.status == WindingStatus::unwrap_failed);
}

TEST_CASE("index_of_pair: identical diffusion plants take the positivity fast path") {
    ContourConfig cfg;
    cfg.circle_n = 2048;
    const Factorization f = diffusion_factorization(0.5);
    const WindingReport rep = index_of_pair(f, f, cfg);
    CHECK(rep.invertible);
    CHECK(rep.stabilized);
    REQUIRE(rep.final_index.has_value());
    CHECK(*rep.final_index == 0);
    for (const auto& rr : rep.per_radius) {
        CHECK(rr.positivity_fast_path);
        REQUIRE(rr.winding.has_value());
        CHECK(*rr.winding == 0);
    }
}

TEST_CASE("index_of_pair: the diffusion pair (0.5, 0.75) certifies index 0") {
    ContourConfig cfg;
    const WindingReport rep =
        index_of_pair(diffusion_factorization(0.5), diffusion_factorization(0.75), cfg);
    CHECK(rep.invertible);
    CHECK(rep.stabilized);
    REQUIRE(rep.final_index.has_value());
    CHECK(*rep.final_index == 0);
    REQUIRE(rep.per_radius.size() == 4);
    // independently computed contour minima
    CHECK(rep.per_radius[0].min_mod == doctest::Approx(0.179678).epsilon(1e-3));
    CHECK(rep.per_radius[1].min_mod == doctest::Approx(0.186070).epsilon(1e-3));
    CHECK(rep.per_radius[2].min_mod == doctest::Approx(0.186710).epsilon(1e-3));
    CHECK(rep.per_radius[3].min_mod == doctest::Approx(0.186774).epsilon(1e-3));
}

TEST_CASE("index_of_pair: mismatched delays stay invertible at the radius schedule") {
    // the limit-algebra obstruction for mismatched delays lives at r -> 1;
    // at the configured radii the pair function is positive-real and
    // certifies index 0, so the d = 1 answer arrives through kappa ~ 1
    ContourConfig cfg;
    const WindingReport rep = index_of_pair(delay_pole_factorization(1.0, 1.0),
                                            delay_pole_factorization(2.0, 1.0), cfg);
    CHECK(rep.invertible);
    CHECK(rep.stabilized);
    REQUIRE(rep.final_index.has_value());
    CHECK(*rep.final_index == 0);
    CHECK(rep.per_radius.back().min_mod == doctest::Approx(0.027123).epsilon(0.2));
}

TEST_CASE("winding report JSON carries exactly the contract fields") {
    ContourConfig cfg;
    cfg.radii = {0.5, 0.9};
    cfg.circle_n = 512;
    const DiscFn f = poly({{-0.9, 0.0}, {1.0, 0.0}});  // zero on the largest circle
    const WindingReport rep = index_of_function(f, cfg);
    const auto j = to_json(rep);

    REQUIRE(j.contains("radii"));
    REQUIRE(j.contains("windings"));
    REQUIRE(j.contains("min_mods"));
    REQUIRE(j.contains("stabilized"));
    REQUIRE(j.contains("index"));
    REQUIRE(j.contains("invertible"));
    CHECK(j.size() == 6);

    CHECK(j["radii"].size() == 2);
    CHECK(j["windings"][0].is_number_integer());
    CHECK(j["windings"][1].is_null());  // winding undefined at r = 0.9
    CHECK(j["index"].is_null());
    CHECK(j["stabilized"] == false);
    CHECK(j["invertible"] == false);
}

TEST_CASE("winding precondition checks") {
    const DiscFn f = poly({{0.0, 0.0}, {1.0, 0.0}});
    CHECK_THROWS_AS(winding_on_circle(f, 1.0, 512), std::invalid_argument);
    CHECK_THROWS_AS(winding_on_circle(f, 0.9, 4), std::invalid_argument);
    ContourConfig bad;
    bad.radii = {0.9};
    CHECK_THROWS_AS(index_of_function(f, bad), std::invalid_argument);
}
