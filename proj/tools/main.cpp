// cgo-kahler command line: verify | recover | converge.
//
// Exit codes: 0 success, 1 runtime/check failure, 2 validation failure.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "cgok/harness.hpp"
#include "cgok/verify.hpp"

namespace {

void print_line(const cgok::CheckLine& c) {
    std::printf("  [%s] %-62s %.3e (tol %.1e)\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value,
                c.threshold);
}

int run_verify(int dim, const std::string& potential, double scale, std::uint64_t seed) {
    using namespace cgok;
    if (dim < 1 || dim > 3) throw ConfigError("verify: --dim must be in 1..3");
    KahlerPotential F = KahlerPotential::from_name(potential, dim, scale);
    std::vector<CheckLine> lines;
    lines.push_back(verify_harmonicity(dim, F, 50, 50, 6, seed));
    lines.push_back(verify_hessian_identity(dim, 100, derive_seed(seed, 1)));
    lines.push_back(verify_det_relation(dim, 50, derive_seed(seed, 2)));
    if (dim <= 2) lines.push_back(verify_stationary_phase(dim, F, dim == 1 ? 0.1 : 0.25));
    std::printf("invariant suites (dim=%d, potential=%s):\n", dim, potential.c_str());
    bool ok = true;
    for (const auto& l : lines) {
        print_line(l);
        ok = ok && l.pass;
    }
    return ok ? 0 : 1;
}

int run_recover(const cgok::ExperimentConfig& cfg) {
    using namespace cgok;
    RecoveryReport report = run_and_write(cfg);
    std::printf("recovery sweep: %zu targets, potential=%s, seed=%llu\n", report.rows.size(),
                cfg.potential.c_str(), static_cast<unsigned long long>(cfg.seed));
    for (const auto& r : report.rows) {
        std::printf("  p=%-28s f=% .6f%+.6fi  fhat=% .6f%+.6fi  rel=%.4f  N=%d  %s\n",
                    format_cpoint(r.requested).c_str(), r.f_true.real(), r.f_true.imag(),
                    r.f_hat.real(), r.f_hat.imag(), r.rel_err, r.critical_points, r.flag.c_str());
    }
    std::printf("global RMS relative error: %.6f\n", report.global_rms_rel);
    std::printf("wrote %s and %s (%.1f s)\n", cfg.out_csv.c_str(), cfg.out_json.c_str(),
                report.runtime_seconds);
    return 0;
}

int run_converge(int dim, const std::string& target_str, const std::string& potential, double scale,
                 std::vector<double> hs, double width, const std::string& out) {
    using namespace cgok;
    if (dim < 1 || dim > 2) throw ConfigError("converge: --dim must be 1 or 2");
    double radius = dim == 1 ? 1.0 : 1.35;
    if (width <= 0) width = dim == 1 ? 0.88 : 1.2;
    DomainBox dom = DomainBox::polydisk(dim, radius, 0.1);
    KahlerPotential F = KahlerPotential::from_name(potential, dim, scale);
    CPoint target = target_str.empty() ? CPoint(dim, Complex(0, 0)) : parse_cpoint(target_str, dim);
    if (!dom.interior(target)) throw ConfigError("converge: target not interior by delta");

    TestDensity density = TestDensity::bump(CPoint(dim, Complex(0, 0)), width);
    density.validate_inside(dom);
    SmoothField field = density.field();

    std::vector<HoloPoly> charts;
    for (int j = 0; j < dim; ++j) charts.push_back(HoloPoly::coordinate(dim, j));
    Phase phase = build_phase(target, charts);
    CriticalSet cs = find_critical_points(phase.phi, dom);
    int ni = cs.nearest(target);
    if (ni < 0) throw Error("converge: no critical point found");
    phase.anchor = cs.points[ni].location;

    std::vector<CPoint> others;
    for (const auto& cp : cs.points)
        if (cgok::distance(cp.location, phase.anchor) >= cs.r_min) others.push_back(cp.location);
    Amplitude amp = build_amplitude(phase.anchor, others);

    QuadratureSpec q;
    Complex f_true = density.value(phase.anchor);
    std::printf("h-refinement at target %s (f = %.8f%+.8fi)\n", format_cpoint(phase.anchor).c_str(),
                f_true.real(), f_true.imag());
    std::printf("%10s %22s %22s %12s %12s\n", "h", "Re I", "Im I", "nodes", "err_est");

    std::string csv = "h,re_I,im_I,nodes,err_est\n";
    std::vector<PairingResult> table;
    for (double h : hs) {
        CGOPair pair(phase, amp, h);
        PairingResult pr = pairing_integral(field, pair, F, dom, q);
        table.push_back(pr);
        std::printf("%10.5f %22.14e %22.14e %12lld %12.3e\n", h, pr.value.real(), pr.value.imag(),
                    static_cast<long long>(pr.nodes), pr.err_estimate);
        csv += format_double(h) + "," + format_double(pr.value.real()) + "," +
               format_double(pr.value.imag()) + "," + std::to_string(pr.nodes) + "," +
               format_double(pr.err_estimate) + "\n";
    }
    std::printf("%10s %22s %12s\n", "k (h's)", "f_hat (prefix fit)", "|f_hat - f|");
    for (std::size_t k = 3; k <= hs.size(); ++k) {
        std::vector<double> prefix(hs.begin(), hs.begin() + k);
        Recovery rec = recover_point_value(field, phase, amp, F, dom, prefix, q);
        std::printf("%10zu % .8f%+.8fi %12.3e\n", k, rec.f_hat.real(), rec.f_hat.imag(),
                    std::abs(rec.f_hat - f_true));
    }
    if (!out.empty()) {
        atomic_write(out, csv);
        std::printf("wrote %s\n", out.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"linearized Calderon recovery on Kahler domains via CGO pairs"};
    app.require_subcommand(1);

    // ---- verify -------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run the invariant suites and print residuals");
    int v_dim = 2;
    std::string v_potential = "fubini-study";
    double v_scale = 1.0;
    std::uint64_t v_seed = 1;
    verify->add_option("--dim", v_dim, "complex dimension (1..3)");
    verify->add_option("--potential", v_potential, "euclidean | fubini-study");
    verify->add_option("--scale", v_scale, "potential scale");
    verify->add_option("--seed", v_seed, "random seed");

    // ---- recover ------------------------------------------------------------
    auto* recover = app.add_subcommand("recover", "pointwise density recovery sweep from a config");
    cgok::ExperimentConfig cfg;
    recover->set_config("--config", "", "TOML experiment configuration")->required();
    recover->add_option("--n", cfg.n, "complex dimension");
    recover->add_option("--domain", cfg.domain_kind, "disk | square");
    recover->add_option("--radius", cfg.domain_radius, "per-coordinate radius/half-width");
    recover->add_option("--delta", cfg.delta, "interior margin");
    recover->add_option("--potential", cfg.potential, "euclidean | fubini-study");
    recover->add_option("--scale", cfg.scale, "potential scale");
    recover->add_option("--targets", cfg.targets, "explicit targets, e.g. \"0.1+0.2i\"");
    recover->add_option("--grid-targets", cfg.grid_targets, "use a tensor target grid");
    recover->add_option("--grid-nodes", cfg.grid_nodes, "grid nodes per real axis");
    recover->add_option("--grid-halfwidth", cfg.grid_halfwidth, "grid half-width");
    recover->add_option("--h-schedule", cfg.h_schedule, "strictly decreasing h values (>= 3)");
    recover->add_option("--panels", cfg.panels, "base quadrature panels per axis");
    recover->add_option("--order", cfg.order, "Gauss-Legendre order per panel");
    recover->add_option("--guard", cfg.guard, "oscillation guard factor (nodes per period)");
    recover->add_option("--epsilon", cfg.epsilon, "Morse perturbation size");
    recover->add_option("--seed", cfg.seed, "random seed");
    recover->add_option("--retries", cfg.retries, "Morse certification retries");
    recover->add_option("--grid-density", cfg.grid_density, "Newton multistart nodes per unit length");
    recover->add_option("--density", cfg.density_kind, "bump | bump-poly | zero");
    recover->add_option("--density-center", cfg.density_center, "bump center");
    recover->add_option("--density-width", cfg.density_width, "bump support radius");
    recover->add_option("--density-factor", cfg.density_factor, "polynomial factor, e.g. \"x1\"");
    recover->add_option("--out", cfg.out_csv, "CSV output path");
    recover->add_option("--out-json", cfg.out_json, "JSON summary path");

    // ---- converge -----------------------------------------------------------
    auto* converge = app.add_subcommand("converge", "single-target h-refinement table");
    int c_dim = 1;
    std::string c_target = "0+0i";
    std::string c_potential = "euclidean";
    double c_scale = 1.0;
    std::vector<double> c_h{0.2, 0.14, 0.1, 0.07, 0.05};
    double c_width = 0.0;
    std::string c_out;
    converge->add_option("--dim", c_dim, "complex dimension (1 or 2)");
    converge->add_option("--target", c_target, "target point, e.g. 0.1+0.2i");
    converge->add_option("--potential", c_potential, "euclidean | fubini-study");
    converge->add_option("--scale", c_scale, "potential scale");
    converge->add_option("--h-schedule", c_h, "h schedule (strictly decreasing)");
    converge->add_option("--width", c_width, "bump width (default 0.88 / 1.2 by dim)");
    converge->add_option("--out", c_out, "write the pairing table as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // malformed invocation or config -> 2
    }

    try {
        if (verify->parsed()) return run_verify(v_dim, v_potential, v_scale, v_seed);
        if (recover->parsed()) {
            cfg.validate();
            return run_recover(cfg);
        }
        if (converge->parsed())
            return run_converge(c_dim, c_target, c_potential, c_scale, c_h, c_width, c_out);
    } catch (const cgok::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
