#include "nugap/plants.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "nugap/expr.hpp"

namespace nugap {

namespace {

// exp(w) - 1 without cancellation for small |w|.
Complex cexpm1(Complex w) {
    if (std::abs(w) >= 0.5) {
        return std::exp(w) - 1.0;
    }
    Complex term = w;
    Complex acc = w;
    for (int k = 2; k <= 26; ++k) {
        term *= w / static_cast<double>(k);
        acc += term;
    }
    return acc;
}

// sinh(w)/w as a degree-12 Taylor polynomial; accurate to ~1e-21 for |w| <= 0.25.
Complex sinhc_poly(Complex w) {
    static constexpr double inv_fact[7] = {
        1.0,
        1.0 / 6.0,
        1.0 / 120.0,
        1.0 / 5040.0,
        1.0 / 362880.0,
        1.0 / 39916800.0,
        1.0 / 6227020800.0,
    };
    const Complex w2 = w * w;
    Complex acc(0.0, 0.0);
    for (int k = 6; k >= 1; --k) {
        acc = (acc + inv_fact[k]) * w2;
    }
    return 1.0 + acc;
}

// sinh(a z)/sinh(z) on the angular domain |Arg z| <= pi/4. Series ratio across
// the removable singularity at z = 0, exponential form elsewhere.
Complex sinh_ratio(double a, Complex z) {
    if (std::abs(z) <= 0.25) {
        return a * sinhc_poly(a * z) / sinhc_poly(z);
    }
    return std::exp(-(1.0 - a) * z) * cexpm1(-2.0 * a * z) / cexpm1(-2.0 * z);
}

// tanh(w) = (1 - e^{-2w})/(1 + e^{-2w}) for Re w >= 0, via expm1.
Complex tanh_stable(Complex w) {
    const Complex e = cexpm1(-2.0 * w);
    return -e / (2.0 + e);
}

// Principal square root with the Arg in (-pi, pi] convention (-0.0 imaginary
// parts on the negative real axis are normalized away).
Complex sqrt_principal(Complex s) {
    if (s.imag() == 0.0) {
        s = Complex(s.real(), 0.0);
    }
    return std::sqrt(s);
}

EvalOutcome guarded_div(Complex num, Complex den) {
    if (std::abs(den) < kPoleTolerance) {
        return EvalOutcome::failure(EvalStatus::pole_hit);
    }
    return classify_value(num / den);
}

double parse_double_field(std::string_view text, std::string_view field) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw SpecParseError("plant spec: bad numeric value for '" + std::string(field) +
                             "': '" + std::string(text) + "'");
    }
    return value;
}

std::string format_param(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace

Factorization diffusion_factorization(double a) {
    if (!(a > 0.0 && a < 1.0)) {
        throw std::invalid_argument("diffusion: parameter a must lie in (0, 1)");
    }
    auto n = [a](Complex s) -> EvalOutcome {
        const Complex z = sqrt_principal(s);
        return guarded_div(sinh_ratio(a, z), z + 1.0);
    };
    auto d = [a](Complex s) -> EvalOutcome {
        const Complex z = sqrt_principal(s);
        auto front = guarded_div(z, z + 1.0);
        if (!front.ok()) return front;
        return classify_value(front.value * tanh_stable(a * z));
    };
    return Factorization{n, d, "diffusion:a=" + format_param(a), true};
}

Factorization delay_pole_factorization(double T, double a) {
    if (!(T > 0.0)) throw std::invalid_argument("delay_pole: T must be > 0");
    if (!(a > 0.0)) throw std::invalid_argument("delay_pole: a must be > 0");
    auto n = [T](Complex s) -> EvalOutcome {
        return guarded_div(std::exp(-s * T) * s, s + 1.0);
    };
    auto d = [a](Complex s) -> EvalOutcome { return guarded_div(s - a, s + 1.0); };
    return Factorization{n, d,
                         "delay_pole:T=" + format_param(T) + ",a=" + format_param(a), true};
}

Factorization delay_zero_factorization(double T, double a, double b) {
    if (!(T > 0.0)) throw std::invalid_argument("delay_zero: T must be > 0");
    if (!(a > 0.0)) throw std::invalid_argument("delay_zero: a must be > 0");
    auto n = [T, b](Complex s) -> EvalOutcome {
        return guarded_div(std::exp(-s * T) * (s - b), s + 1.0);
    };
    auto d = [a](Complex s) -> EvalOutcome { return guarded_div(s - a, s + 1.0); };
    return Factorization{n, d,
                         "delay_zero:T=" + format_param(T) + ",a=" + format_param(a) +
                             ",b=" + format_param(b),
                         true};
}

Factorization retarded_factorization(double delta) {
    if (!(std::abs(delta) < 1.0)) {
        throw std::invalid_argument("retarded: |delta| must be < 1");
    }
    auto n = [](Complex s) -> EvalOutcome { return guarded_div(Complex(1.0, 0.0), s + 1.0); };
    auto d = [delta](Complex s) -> EvalOutcome {
        return guarded_div(s - (1.0 + delta) * std::exp(-s), s + 1.0);
    };
    return Factorization{n, d, "retarded:delta=" + format_param(delta), true};
}

Factorization expr_factorization(std::string_view n_text, std::string_view d_text) {
    ExprPtr n_ast = parse_expr(n_text);
    ExprPtr d_ast = parse_expr(d_text);
    auto n = [n_ast](Complex s) { return eval(*n_ast, s); };
    auto d = [d_ast](Complex s) { return eval(*d_ast, s); };
    return Factorization{n, d,
                         "expr:n=" + std::string(n_text) + ";d=" + std::string(d_text),
                         true};
}

EvalOutcome mobius_to_halfplane(Complex z) {
    return guarded_div(1.0 + z, 1.0 - z);
}

EvalOutcome mobius_to_disc(Complex s) {
    return guarded_div(s - 1.0, s + 1.0);
}

MobiusPoint mobius_point_from_halfplane(Complex s) {
    MobiusPoint p;
    p.s = s;
    auto z = mobius_to_disc(s);
    if (z.ok()) p.z = z.value;
    return p;
}

MobiusPoint mobius_point_from_disc(Complex z) {
    MobiusPoint p;
    p.z = z;
    auto s = mobius_to_halfplane(z);
    if (s.ok()) p.s = s.value;
    return p;
}

std::array<Complex, 16> interior_probe_points() {
    std::array<Complex, 16> pts;
    static constexpr double radii[4] = {0.3, 1.0, 3.0, 10.0};
    static constexpr double degrees[4] = {-70.0, -25.0, 25.0, 70.0};
    std::size_t k = 0;
    for (double r : radii) {
        for (double deg : degrees) {
            const double th = deg * M_PI / 180.0;
            pts[k++] = Complex(r * std::cos(th), r * std::sin(th));
        }
    }
    return pts;
}

PlantSpec parse_plant_spec(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw SpecParseError("plant spec: missing ':' in '" + std::string(text) + "'");
    }
    std::string_view family = text.substr(0, colon);
    std::string_view rest = text.substr(colon + 1);

    PlantSpec spec;
    if (family == "expr") {
        spec.family = PlantSpec::Family::expr;
        // n=<formula>;d=<formula>
        auto semi = rest.find(';');
        if (semi == std::string_view::npos) {
            throw SpecParseError("plant spec: expr form requires 'n=<formula>;d=<formula>'");
        }
        std::string_view n_part = rest.substr(0, semi);
        std::string_view d_part = rest.substr(semi + 1);
        if (n_part.substr(0, 2) != "n=" || d_part.substr(0, 2) != "d=") {
            throw SpecParseError("plant spec: expr form requires 'n=<formula>;d=<formula>'");
        }
        spec.n_text = std::string(n_part.substr(2));
        spec.d_text = std::string(d_part.substr(2));
        if (spec.n_text.empty() || spec.d_text.empty()) {
            throw SpecParseError("plant spec: empty formula in expr plant");
        }
        return spec;
    }

    if (family == "diffusion") spec.family = PlantSpec::Family::diffusion;
    else if (family == "delay_pole") spec.family = PlantSpec::Family::delay_pole;
    else if (family == "delay_zero") spec.family = PlantSpec::Family::delay_zero;
    else if (family == "retarded") spec.family = PlantSpec::Family::retarded;
    else {
        throw SpecParseError("plant spec: unknown family '" + std::string(family) + "'");
    }

    bool seen_a = false, seen_T = false, seen_b = false, seen_delta = false;
    while (!rest.empty()) {
        auto comma = rest.find(',');
        std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw SpecParseError("plant spec: expected key=value, got '" + std::string(item) +
                                 "'");
        }
        std::string_view key = item.substr(0, eq);
        double value = parse_double_field(item.substr(eq + 1), key);
        if (key == "a") { spec.a = value; seen_a = true; }
        else if (key == "T") { spec.T = value; seen_T = true; }
        else if (key == "b") { spec.b = value; seen_b = true; }
        else if (key == "delta") { spec.delta = value; seen_delta = true; }
        else {
            throw SpecParseError("plant spec: unknown key '" + std::string(key) + "'");
        }
    }

    auto require = [&](bool seen, const char* key) {
        if (!seen) {
            throw SpecParseError(std::string("plant spec: missing parameter '") + key +
                                 "' for family '" + std::string(family) + "'");
        }
    };
    switch (spec.family) {
        case PlantSpec::Family::diffusion:
            require(seen_a, "a");
            break;
        case PlantSpec::Family::delay_pole:
            require(seen_T, "T");
            require(seen_a, "a");
            break;
        case PlantSpec::Family::delay_zero:
            require(seen_T, "T");
            require(seen_a, "a");
            require(seen_b, "b");
            break;
        case PlantSpec::Family::retarded:
            require(seen_delta, "delta");
            break;
        case PlantSpec::Family::expr:
            break;
    }
    return spec;
}

std::string to_spec_string(const PlantSpec& spec) {
    switch (spec.family) {
        case PlantSpec::Family::diffusion:
            return "diffusion:a=" + format_param(spec.a);
        case PlantSpec::Family::delay_pole:
            return "delay_pole:T=" + format_param(spec.T) + ",a=" + format_param(spec.a);
        case PlantSpec::Family::delay_zero:
            return "delay_zero:T=" + format_param(spec.T) + ",a=" + format_param(spec.a) +
                   ",b=" + format_param(spec.b);
        case PlantSpec::Family::retarded:
            return "retarded:delta=" + format_param(spec.delta);
        case PlantSpec::Family::expr:
            return "expr:n=" + spec.n_text + ";d=" + spec.d_text;
    }
    return {};
}

std::vector<std::string> plant_warnings(const PlantSpec& spec) {
    std::vector<std::string> warnings;
    if (spec.family == PlantSpec::Family::diffusion) {
        const double dist = std::min(spec.a, 1.0 - spec.a);
        if (dist > 0.0 && dist < 1e-4) {
            std::ostringstream msg;
            msg << "parameter-range warning: diffusion a=" << spec.a
                << " is within " << dist << " of its range boundary (0,1)";
            warnings.push_back(msg.str());
        }
    }
    if (spec.family == PlantSpec::Family::retarded) {
        const double dist = 1.0 - std::abs(spec.delta);
        if (dist > 0.0 && dist < 1e-4) {
            std::ostringstream msg;
            msg << "parameter-range warning: retarded delta=" << spec.delta
                << " is within " << dist << " of its range boundary (-1,1)";
            warnings.push_back(msg.str());
        }
    }
    return warnings;
}

Factorization make_plant(const PlantSpec& spec) {
    switch (spec.family) {
        case PlantSpec::Family::diffusion:
            return diffusion_factorization(spec.a);
        case PlantSpec::Family::delay_pole:
            return delay_pole_factorization(spec.T, spec.a);
        case PlantSpec::Family::delay_zero:
            return delay_zero_factorization(spec.T, spec.a, spec.b);
        case PlantSpec::Family::retarded:
            return retarded_factorization(spec.delta);
        case PlantSpec::Family::expr:
            return expr_factorization(spec.n_text, spec.d_text);
    }
    throw std::invalid_argument("plant spec: unknown family");
}

}  // namespace nugap
