#include "nugap/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nugap/expr.hpp"
#include "nugap/numetric.hpp"
#include "nugap/stability.hpp"

namespace nugap {

namespace {

struct RunConfig {
    enum class Command { compute, sweep, index, margin, stabilize, verify };
    Command command = Command::compute;
    std::vector<std::string> plant_specs;
    std::string controller_spec;
    std::vector<std::string> neighbor_specs;
    ContourConfig contour;
    std::string format = "json";
    std::string out_path;
    bool sweep_requested = false;
};

// Writes either to the --out file or to the primary stream.
class OutputTarget {
public:
    OutputTarget(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw std::runtime_error("cannot open output file: " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

void emit_json(const nlohmann::ordered_json& j, RunConfig& cfg, std::ostream& out) {
    OutputTarget target(cfg.out_path, out);
    target.stream() << j.dump(2) << '\n';
}

Factorization load_plant(const std::string& spec_text, std::ostream& err) {
    const PlantSpec spec = parse_plant_spec(spec_text);
    for (const auto& warning : plant_warnings(spec)) {
        err << warning << '\n';
    }
    return make_plant(spec);
}

int cmd_compute(RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Factorization f1 = load_plant(cfg.plant_specs[0], err);
    const Factorization f2 = load_plant(cfg.plant_specs[1], err);
    const NuReport report = nu_metric(f1, f2, cfg.contour, cfg.sweep_requested);
    emit_json(to_json(report), cfg, out);
    return report.condition_held ? kExitOk : kExitConditionFailed;
}

int cmd_sweep(RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Factorization f1 = load_plant(cfg.plant_specs[0], err);
    const Factorization f2 = load_plant(cfg.plant_specs[1], err);
    const KappaResult result = kappa_distance(f1, f2, cfg.contour, true);
    if (cfg.format == "csv") {
        OutputTarget target(cfg.out_path, out);
        write_sweep_csv(target.stream(), result.sweep);
    } else {
        nlohmann::ordered_json j;
        j["kappa"] = result.value;
        j["kappa_argmax_y"] = result.argmax_y;
        nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
        for (const auto& [y, kappa] : result.sweep) {
            sweep.push_back(nlohmann::ordered_json::array({y, kappa}));
        }
        j["sweep"] = std::move(sweep);
        emit_json(j, cfg, out);
    }
    return kExitOk;
}

int cmd_index(RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Factorization f1 = load_plant(cfg.plant_specs[0], err);
    const Factorization f2 = load_plant(cfg.plant_specs[1], err);
    emit_json(to_json(index_of_pair(f1, f2, cfg.contour)), cfg, out);
    return kExitOk;
}

int cmd_margin(RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Factorization f = load_plant(cfg.plant_specs[0], err);
    const SupEstimate margin = coprimeness_margin(f, cfg.contour);
    nlohmann::ordered_json j;
    j["plant"] = f.label;
    j["margin"] = margin.value;
    j["argmin_y"] = margin.arg;
    j["at_contour_end"] = margin.at_contour_end;
    j["failures"] = margin.failures;
    emit_json(j, cfg, out);
    return kExitOk;
}

int cmd_stabilize(RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const Factorization plant = load_plant(cfg.plant_specs[0], err);
    const Factorization controller = load_plant(cfg.controller_spec, err);
    const LoopReport report = closed_loop_check(plant, controller, cfg.contour);
    nlohmann::ordered_json j = to_json(report);
    if (!cfg.neighbor_specs.empty()) {
        std::vector<Factorization> neighbors;
        neighbors.reserve(cfg.neighbor_specs.size());
        for (const auto& spec : cfg.neighbor_specs) {
            neighbors.push_back(load_plant(spec, err));
        }
        nlohmann::ordered_json probe = nlohmann::ordered_json::array();
        for (const auto& pr : robustness_probe(plant, controller, neighbors, cfg.contour)) {
            probe.push_back(nlohmann::ordered_json{
                {"plant", pr.label}, {"d", pr.d_value}, {"stable", pr.stable}});
        }
        j["probe"] = std::move(probe);
        j["probe_note"] = "empirical exhibit of the robustness ball, not a certified margin";
    }
    emit_json(j, cfg, out);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify: built-in property suite

struct CheckResult {
    bool pass = false;
    std::string detail;
};

using CheckFn = std::function<CheckResult()>;

CheckResult check_margins_positive(const ContourConfig& contour) {
    std::ostringstream detail;
    bool pass = true;
    for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const SupEstimate margin =
            coprimeness_margin(diffusion_factorization(a), contour);
        if (!(margin.value > 0.0)) pass = false;
        detail << "a=" << a << ":" << std::setprecision(4) << margin.value << " ";
    }
    return {pass, "inf |n|^2+|d|^2 " + detail.str()};
}

CheckResult check_far_field_margin(const ContourConfig& contour) {
    const AxisGrid grid = make_axis_grid(contour.y_min, contour.y_max, contour.grid_n);
    bool pass = true;
    double worst = std::numeric_limits<double>::infinity();
    for (double a : {0.1, 0.5, 0.9}) {
        const Factorization f = diffusion_factorization(a);
        for (double y : grid.points) {
            if (std::abs(y) <= 1e4) continue;
            auto n = f.n(Complex(0.0, y));
            auto d = f.d(Complex(0.0, y));
            if (!n.ok() || !d.ok()) { pass = false; continue; }
            const double m = std::norm(n.value) + std::norm(d.value);
            worst = std::min(worst, m);
            if (m < 0.45) pass = false;
        }
    }
    std::ostringstream detail;
    detail << "min margin over |s|>1e4 samples = " << worst << " (need >= 0.45)";
    return {pass, detail.str()};
}

CheckResult check_asymptotics(const ContourConfig&) {
    const Complex s_far = 1e12 * std::polar(1.0, M_PI / 4.0);
    bool pass = true;
    double worst_n = 0.0, worst_d = 0.0;
    for (double a : {0.3, 0.5, 0.7}) {
        const Factorization f = diffusion_factorization(a);
        auto n = f.n(s_far);
        auto d = f.d(s_far);
        if (!n.ok() || !d.ok()) return {false, "far-field evaluation failed"};
        worst_n = std::max(worst_n, std::abs(n.value));
        worst_d = std::max(worst_d, std::abs(d.value - 1.0));
    }
    pass = worst_n < 1e-3 && worst_d < 1e-3;
    std::ostringstream detail;
    detail << "|n|<=" << worst_n << ", |d-1|<=" << worst_d << " at |s|=1e12 (need < 1e-3)";
    return {pass, detail.str()};
}

CheckResult check_continuity(const ContourConfig& contour) {
    const AxisGrid grid = make_axis_grid(contour.y_min, contour.y_max,
                                         std::min<std::size_t>(contour.grid_n, 1024));
    const Factorization base = diffusion_factorization(0.5);
    double prev_n = std::numeric_limits<double>::infinity();
    double prev_d = std::numeric_limits<double>::infinity();
    bool pass = true;
    std::ostringstream detail;
    for (int k = 0; k < 5; ++k) {
        const double atilde = 0.5 + 0.2 / static_cast<double>(1 << k);
        const Factorization other = diffusion_factorization(atilde);
        double sup_n = 0.0, sup_d = 0.0;
        for (double y : grid.points) {
            const Complex s(0.0, y);
            auto n1 = base.n(s); auto n2 = other.n(s);
            auto d1 = base.d(s); auto d2 = other.d(s);
            if (!n1.ok() || !n2.ok() || !d1.ok() || !d2.ok()) { pass = false; continue; }
            sup_n = std::max(sup_n, std::abs(n1.value - n2.value));
            sup_d = std::max(sup_d, std::abs(d1.value - d2.value));
        }
        if (k > 0 && !(sup_n < prev_n && sup_d < prev_d)) pass = false;
        prev_n = sup_n;
        prev_d = sup_d;
        detail << std::setprecision(3) << sup_n << "/" << sup_d << " ";
    }
    return {pass, "sup|n_a-n_at|/sup|d_a-d_at| halving: " + detail.str()};
}

CheckResult check_winding_axioms(const ContourConfig& contour) {
    bool pass = true;
    std::ostringstream detail;

    auto w_of = [&](const DiscFn& f, double r) -> std::optional<int> {
        return winding_on_circle(f, r, 1024).winding;
    };

    // powers of z wind exactly n times
    for (int n = -3; n <= 3; ++n) {
        DiscFn f = [n](Complex z) {
            return classify_value(std::pow(z, n));
        };
        auto w = w_of(f, 0.9);
        if (!w || *w != n) {
            pass = false;
            detail << "w(z^" << n << ") != " << n << " ";
        }
    }

    // additivity w(fg) = w(f) + w(g), including a conjugate factor
    DiscFn f1 = [](Complex z) { return classify_value(z); };
    DiscFn f2 = [](Complex z) { return classify_value(z * z + Complex(0.5, 0.0)); };
    DiscFn f3 = [](Complex z) { return classify_value(std::conj(z)); };
    for (double r : contour.radii) {
        auto wa = w_of(f1, r);
        auto wb = w_of(f2, r);
        auto wc = w_of(f3, r);
        auto wab = w_of([&](Complex z) {
            return classify_value(z * (z * z + Complex(0.5, 0.0)));
        }, r);
        auto wac = w_of([&](Complex z) { return classify_value(z * std::conj(z)); }, r);
        if (!wa || !wb || !wc || !wab || !wac || *wab != *wa + *wb || *wac != *wa + *wc) {
            pass = false;
            detail << "additivity failed at r=" << r << " ";
        }
    }

    // conjugation flips the sign
    DiscFn h = [](Complex z) { return classify_value(z * z * z + Complex(0.1, 0.0)); };
    DiscFn h_conj = [&](Complex z) {
        auto v = h(z);
        if (!v.ok()) return v;
        return EvalOutcome::success(std::conj(v.value));
    };
    auto wh = w_of(h, 0.9);
    auto whc = w_of(h_conj, 0.9);
    if (!wh || !whc || *whc != -*wh) {
        pass = false;
        detail << "conjugation flip failed ";
    }

    // positivity implies index 0
    WindingReport positive = index_of_function(
        [](Complex z) { return classify_value(2.0 + z); }, contour);
    if (!positive.stabilized || !positive.final_index || *positive.final_index != 0 ||
        !positive.invertible) {
        pass = false;
        detail << "positivity shortcut failed ";
    }

    if (pass) detail << "powers, additivity, conjugation, positivity all exact";
    return {pass, detail.str()};
}

CheckResult check_metric_identity(const ContourConfig& contour) {
    bool pass = true;
    double worst = 0.0;
    for (const auto& spec : {std::string("diffusion:a=0.5"), std::string("delay_pole:T=1,a=1"),
                             std::string("delay_zero:T=1,a=1,b=0.1"),
                             std::string("retarded:delta=0.05")}) {
        const Factorization f = make_plant(parse_plant_spec(spec));
        const NuReport rep = nu_metric(f, f, contour);
        worst = std::max(worst, rep.d_value);
        if (!(rep.d_value < 1e-10)) pass = false;
    }
    std::ostringstream detail;
    detail << "max d(p,p) = " << worst << " (need < 1e-10)";
    return {pass, detail.str()};
}

CheckResult check_metric_symmetry(const Factorization& f1, const Factorization& f2,
                                  const ContourConfig& contour) {
    const double d12 = nu_metric(f1, f2, contour).d_value;
    const double d21 = nu_metric(f2, f1, contour).d_value;
    std::ostringstream detail;
    detail << "|d12-d21| = " << std::abs(d12 - d21) << " (need < 1e-9)";
    return {std::abs(d12 - d21) < 1e-9, detail.str()};
}

CheckResult check_triangle(const ContourConfig& contour) {
    const Factorization p1 = diffusion_factorization(0.3);
    const Factorization p2 = diffusion_factorization(0.5);
    const Factorization p3 = diffusion_factorization(0.7);
    const double d13 = nu_metric(p1, p3, contour).d_value;
    const double d12 = nu_metric(p1, p2, contour).d_value;
    const double d23 = nu_metric(p2, p3, contour).d_value;
    std::ostringstream detail;
    detail << "d13=" << d13 << " vs d12+d23=" << d12 + d23;
    return {d13 <= d12 + d23 + 1e-6, detail.str()};
}

CheckResult check_resolution_stability(const Factorization& f1, const Factorization& f2,
                                       const ContourConfig& contour) {
    const double base = kappa_distance(f1, f2, contour).value;
    ContourConfig doubled = contour;
    doubled.grid_n *= 2;
    doubled.refine_iters *= 2;
    const double fine = kappa_distance(f1, f2, doubled).value;
    std::ostringstream detail;
    detail << "kappa " << std::setprecision(10) << base << " -> " << fine
           << ", |diff| = " << std::abs(fine - base) << " (need < 1e-4)";
    return {std::abs(fine - base) < 1e-4, detail.str()};
}

int cmd_verify(RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::string spec1 = cfg.plant_specs.size() > 0 ? cfg.plant_specs[0] : "diffusion:a=0.5";
    std::string spec2 = cfg.plant_specs.size() > 1 ? cfg.plant_specs[1] : "diffusion:a=0.75";
    const PlantSpec ps1 = parse_plant_spec(spec1);
    const PlantSpec ps2 = parse_plant_spec(spec2);
    for (const auto& spec : {ps1, ps2}) {
        for (const auto& warning : plant_warnings(spec)) {
            out << "[WARN] " << warning << '\n';
        }
    }
    const Factorization f1 = make_plant(ps1);
    const Factorization f2 = make_plant(ps2);
    const ContourConfig& contour = cfg.contour;

    const std::vector<std::pair<std::string, CheckFn>> checks = {
        {"factor-margins-positive", [&] { return check_margins_positive(contour); }},
        {"far-field-margin", [&] { return check_far_field_margin(contour); }},
        {"factor-asymptotics", [&] { return check_asymptotics(contour); }},
        {"parameter-continuity", [&] { return check_continuity(contour); }},
        {"winding-axioms", [&] { return check_winding_axioms(contour); }},
        {"metric-identity", [&] { return check_metric_identity(contour); }},
        {"metric-symmetry", [&] { return check_metric_symmetry(f1, f2, contour); }},
        {"triangle-inequality", [&] { return check_triangle(contour); }},
        {"resolution-stability",
         [&] { return check_resolution_stability(f1, f2, contour); }},
    };

    bool all_pass = true;
    for (const auto& [name, fn] : checks) {
        CheckResult result;
        try {
            result = fn();
        } catch (const std::exception& e) {
            result = {false, std::string("error: ") + e.what()};
        }
        if (!result.pass) all_pass = false;
        out << (result.pass ? "[PASS] " : "[FAIL] ") << name << ": " << result.detail
            << '\n';
    }
    (void)err;
    return all_pass ? kExitOk : kExitNumericFailure;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--plant1", "first plant spec");
    sub->add_option("--plant2", "second plant spec");
    sub->add_option("--controller", cfg.controller_spec, "controller spec");
    sub->add_option("--ymin", cfg.contour.y_min, "axis grid lower |y| bound");
    sub->add_option("--ymax", cfg.contour.y_max, "axis grid upper |y| bound");
    sub->add_option("--grid-n", cfg.contour.grid_n, "axis grid points per sign");
    sub->add_option("--refine-iters", cfg.contour.refine_iters,
                    "golden-section refinement rounds");
    sub->add_option("--radii", cfg.contour.radii, "winding circle radii")
        ->delimiter(',');
    sub->add_option("--circle-n", cfg.contour.circle_n, "samples per winding circle");
    sub->add_option("--format", cfg.format, "output format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out_path, "output file path");
    sub->add_flag("--sweep", cfg.sweep_requested, "record the kappa sweep");
}

// Positional specs and --plant1/--plant2 both feed the plant list; named
// options win over positionals.
void collect_plants(CLI::App* sub, const std::vector<std::string>& positionals,
                    RunConfig& cfg) {
    std::vector<std::string> specs = positionals;
    const auto named1 = sub->get_option("--plant1")->results();
    const auto named2 = sub->get_option("--plant2")->results();
    if (!named1.empty()) {
        if (specs.empty()) specs.push_back(named1.front());
        else specs[0] = named1.front();
    }
    if (!named2.empty()) {
        while (specs.size() < 2) specs.emplace_back();
        specs[1] = named2.front();
    }
    cfg.plant_specs = std::move(specs);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"nu-metric computations for coprime factor plants"};
    app.require_subcommand(0, 1);

    RunConfig cfg;
    std::vector<std::string> positionals;
    std::vector<std::string> neighbors;

    CLI::App* compute = app.add_subcommand("compute", "nu-metric between two plants");
    compute->add_option("plants", positionals, "plant specs")->expected(0, 2);
    add_common_options(compute, cfg);

    CLI::App* sweep = app.add_subcommand("sweep", "chordal-distance sweep y -> kappa(y)");
    sweep->add_option("plants", positionals, "plant specs")->expected(0, 2);
    add_common_options(sweep, cfg);

    CLI::App* index_cmd = app.add_subcommand("index", "winding-index report for a pair");
    index_cmd->add_option("plants", positionals, "plant specs")->expected(0, 2);
    add_common_options(index_cmd, cfg);

    CLI::App* margin = app.add_subcommand("margin", "coprimeness margin of one plant");
    margin->add_option("plants", positionals, "plant spec")->expected(0, 1);
    add_common_options(margin, cfg);

    CLI::App* stabilize =
        app.add_subcommand("stabilize", "closed-loop stability check (plant + controller)");
    stabilize->add_option("plants", positionals,
                          "plant spec, then neighbor specs to probe");
    add_common_options(stabilize, cfg);

    CLI::App* verify = app.add_subcommand("verify", "run the built-in property suite");
    verify->add_option("plants", positionals, "plant specs")->expected(0, 2);
    add_common_options(verify, cfg);

    std::vector<const char*> argv;
    argv.push_back("nu-gap");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    CLI::App* active = nullptr;
    if (compute->parsed()) { active = compute; cfg.command = RunConfig::Command::compute; }
    else if (sweep->parsed()) { active = sweep; cfg.command = RunConfig::Command::sweep; }
    else if (index_cmd->parsed()) { active = index_cmd; cfg.command = RunConfig::Command::index; }
    else if (margin->parsed()) { active = margin; cfg.command = RunConfig::Command::margin; }
    else if (stabilize->parsed()) { active = stabilize; cfg.command = RunConfig::Command::stabilize; }
    else if (verify->parsed()) { active = verify; cfg.command = RunConfig::Command::verify; }
    else {
        err << "usage error: expected a subcommand "
               "(compute|sweep|index|margin|stabilize|verify)\n";
        return kExitUsage;
    }
    if (cfg.command == RunConfig::Command::stabilize && positionals.size() > 1) {
        neighbors.assign(positionals.begin() + 1, positionals.end());
        positionals.resize(1);
    }
    collect_plants(active, positionals, cfg);
    cfg.neighbor_specs = std::move(neighbors);

    // the sweep command emits CSV unless a format was requested explicitly
    if (cfg.command == RunConfig::Command::sweep &&
        active->get_option("--format")->count() == 0) {
        cfg.format = "csv";
    }

    // validate settings shared by every command
    if (!(cfg.contour.y_min > 0.0) || !(cfg.contour.y_min < cfg.contour.y_max)) {
        err << "usage error: need 0 < ymin < ymax\n";
        return kExitUsage;
    }
    for (double r : cfg.contour.radii) {
        if (!(r > 0.0 && r < 1.0)) {
            err << "usage error: radii must lie in (0, 1)\n";
            return kExitUsage;
        }
    }

    auto require_plants = [&](std::size_t count) {
        if (cfg.plant_specs.size() != count) {
            std::ostringstream msg;
            msg << "usage error: this command requires " << count << " plant spec(s), got "
                << cfg.plant_specs.size();
            throw CLI::ValidationError(msg.str());
        }
        for (const auto& spec : cfg.plant_specs) {
            if (spec.empty()) throw CLI::ValidationError("usage error: empty plant spec");
        }
    };

    try {
        switch (cfg.command) {
            case RunConfig::Command::compute:
                require_plants(2);
                if (cfg.format != "json") {
                    throw CLI::ValidationError("usage error: compute emits JSON only");
                }
                return cmd_compute(cfg, out, err);
            case RunConfig::Command::sweep:
                require_plants(2);
                return cmd_sweep(cfg, out, err);
            case RunConfig::Command::index:
                require_plants(2);
                return cmd_index(cfg, out, err);
            case RunConfig::Command::margin:
                require_plants(1);
                return cmd_margin(cfg, out, err);
            case RunConfig::Command::stabilize:
                require_plants(1);
                if (cfg.controller_spec.empty()) {
                    throw CLI::ValidationError("usage error: stabilize requires --controller");
                }
                return cmd_stabilize(cfg, out, err);
            case RunConfig::Command::verify:
                return cmd_verify(cfg, out, err);
        }
        return kExitNumericFailure;
    } catch (const CLI::ValidationError& e) {
        err << e.what() << '\n';
        return kExitUsage;
    } catch (const SpecParseError& e) {
        err << "spec error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "spec error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "spec error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumericFailure;
    }
}

}  // namespace nugap
