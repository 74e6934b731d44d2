#ifndef CGOK_HARNESS_HPP
#define CGOK_HARNESS_HPP

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "cgok/density.hpp"
#include "cgok/pairing.hpp"

namespace cgok {

// ---------------------------------------------------------------------------
// Complex formatting helpers (CSV fields and config strings)
// ---------------------------------------------------------------------------

/// Parse "a+bi" / "a-bi" / "a" / "bi" into a complex number.
inline Complex parse_complex(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw ConfigError("parse_complex: empty string");
    if (t.back() == 'i' || t.back() == 'I' || t.back() == 'j' || t.back() == 'J') {
        t.pop_back();
        // split off the real part if present: scan for a +/- that is not an
        // exponent sign and not the leading sign
        std::size_t split = std::string::npos;
        for (std::size_t k = 1; k < t.size(); ++k) {
            if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') split = k;
        }
        if (split == std::string::npos) {
            if (t.empty() || t == "+" ) return {0.0, 1.0};
            if (t == "-") return {0.0, -1.0};
            return {0.0, std::stod(t)};
        }
        std::string re = t.substr(0, split);
        std::string im = t.substr(split);
        if (im == "+") im = "1";
        if (im == "-") im = "-1";
        return {std::stod(re), std::stod(im)};
    }
    return {std::stod(t), 0.0};
}

/// Parse "z1;z2;..." into a point of the given dimension.
inline CPoint parse_cpoint(const std::string& s, int n) {
    CPoint p;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        std::size_t semi = s.find(';', pos);
        std::string tok = s.substr(pos, semi == std::string::npos ? std::string::npos : semi - pos);
        if (!tok.empty()) p.push_back(parse_complex(tok));
        if (semi == std::string::npos) break;
        pos = semi + 1;
    }
    if (static_cast<int>(p.size()) != n)
        throw ConfigError("expected " + std::to_string(n) + " coordinates in '" + s + "'");
    return p;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_complex(Complex c) {
    std::string s = format_double(c.real());
    s += (c.imag() < 0 ? "" : "+");
    s += format_double(c.imag());
    s += "i";
    return s;
}

inline std::string format_cpoint(const CPoint& p) {
    std::string s;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (j) s += ";";
        s += format_complex(p[j]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    int n = 1;

    std::string domain_kind = "disk"; // disk | square per coordinate
    double domain_radius = 1.0;
    double delta = 0.1;

    std::string potential = "euclidean";
    double scale = 1.0;

    std::vector<std::string> targets; // explicit list, "re+imi;..." per target
    bool grid_targets = false;
    int grid_nodes = 3;        // per real axis
    double grid_halfwidth = 0.3;

    std::vector<double> h_schedule{0.2, 0.14, 0.1, 0.07, 0.05};
    int panels = 4;
    int order = 10;
    double guard = 6.0;

    double epsilon = 1e-2;
    std::uint64_t seed = 1;
    int retries = 16;
    double grid_density = 8.0;

    std::string density_kind = "bump"; // bump | bump-poly | zero
    std::string density_center;        // default: origin
    double density_width = 0.88;
    std::string density_factor = "x1";

    std::string out_csv = "recovery.csv";
    std::string out_json = "recovery.json";

    DomainBox make_domain() const {
        if (domain_kind == "disk") return DomainBox::polydisk(n, domain_radius, delta);
        if (domain_kind == "square") return DomainBox::polysquare(n, domain_radius, delta);
        throw ConfigError("domain must be 'disk' or 'square'");
    }

    KahlerPotential make_potential() const { return KahlerPotential::from_name(potential, n, scale); }

    TestDensity make_density() const {
        CPoint c = density_center.empty() ? CPoint(n, Complex(0, 0)) : parse_cpoint(density_center, n);
        if (density_kind == "zero") return TestDensity::zero(n);
        if (density_kind == "bump") return TestDensity::bump(c, density_width);
        if (density_kind == "bump-poly")
            return TestDensity::bump_poly(c, density_width, parse_poly_factor(density_factor, n));
        throw ConfigError("density must be 'bump', 'bump-poly' or 'zero'");
    }

    QuadratureSpec make_quadrature() const {
        QuadratureSpec q;
        q.panels = panels;
        q.order = order;
        q.guard_factor = guard;
        q.auto_panels = true;
        return q;
    }

    std::vector<CPoint> make_targets() const {
        std::vector<CPoint> out;
        if (grid_targets) {
            // tensor grid over the 2n real axes, centered at the origin
            int g = grid_nodes;
            if (g < 1) throw ConfigError("grid_nodes must be >= 1");
            std::vector<double> ticks(g);
            for (int i = 0; i < g; ++i)
                ticks[i] = g == 1 ? 0.0 : -grid_halfwidth + 2.0 * grid_halfwidth * i / (g - 1);
            std::vector<std::size_t> idx(2 * n, 0);
            while (true) {
                CPoint p(n);
                for (int j = 0; j < n; ++j) p[j] = Complex(ticks[idx[2 * j]], ticks[idx[2 * j + 1]]);
                out.push_back(p);
                int ax = 2 * n - 1;
                while (ax >= 0 && ++idx[ax] == static_cast<std::size_t>(g)) idx[ax--] = 0;
                if (ax < 0) break;
            }
        } else {
            for (const auto& s : targets) out.push_back(parse_cpoint(s, n));
        }
        return out;
    }

    void validate() const {
        if (n < 1) throw ConfigError("n must be >= 1");
        DomainBox dom = make_domain();
        make_potential();
        TestDensity den = make_density();
        den.validate_inside(dom);
        auto tg = make_targets();
        if (tg.empty()) throw ConfigError("no targets specified");
        for (const auto& p : tg)
            if (!dom.interior(p))
                throw ConfigError("target " + format_cpoint(p) + " is not interior by delta");
        if (h_schedule.size() < 3) throw ConfigError("h_schedule needs at least 3 values");
        for (std::size_t k = 0; k < h_schedule.size(); ++k) {
            if (h_schedule[k] <= 0) throw ConfigError("h values must be positive");
            if (k && h_schedule[k] >= h_schedule[k - 1])
                throw ConfigError("h_schedule must be strictly decreasing");
        }
        if (epsilon < 0) throw ConfigError("epsilon must be >= 0");
        if (retries < 1) throw ConfigError("retries must be >= 1");
        if (grid_density < 4) throw ConfigError("grid_density must be >= 4");
        if (order < 2 || panels < 1 || guard < 1) throw ConfigError("invalid quadrature spec");
    }
};

// ---------------------------------------------------------------------------
// Recovery report
// ---------------------------------------------------------------------------

struct TargetRow {
    int index = 0;
    CPoint requested;
    CPoint certified;
    Complex f_true{0, 0};
    Complex f_hat{0, 0};
    double abs_err = 0;
    double rel_err = 0;
    double fit_residual = 0;
    double order_estimate = 0;
    int critical_points = 0;
    std::string flag = "ok";
};

struct RecoveryReport {
    std::vector<TargetRow> rows;
    double global_rms_rel = 0; // sqrt(sum |fhat-f|^2 / sum |f|^2) over ok rows
    double runtime_seconds = 0; // console only; never serialized
    int schema = 1;

    static constexpr const char* kCsvHeader =
        "index,requested,certified,f_true_re,f_true_im,f_hat_re,f_hat_im,"
        "abs_err,rel_err,fit_residual,order_estimate,critical_points,flag";

    std::string to_csv() const {
        std::string s(kCsvHeader);
        s += "\n";
        for (const auto& r : rows) {
            s += std::to_string(r.index) + ",";
            s += format_cpoint(r.requested) + ",";
            s += format_cpoint(r.certified) + ",";
            s += format_double(r.f_true.real()) + "," + format_double(r.f_true.imag()) + ",";
            s += format_double(r.f_hat.real()) + "," + format_double(r.f_hat.imag()) + ",";
            s += format_double(r.abs_err) + "," + format_double(r.rel_err) + ",";
            s += format_double(r.fit_residual) + "," + format_double(r.order_estimate) + ",";
            s += std::to_string(r.critical_points) + "," + r.flag + "\n";
        }
        return s;
    }

    nlohmann::json to_json_summary(const ExperimentConfig& cfg) const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& r : rows) {
            rows_json.push_back({{"index", r.index},
                                 {"requested", format_cpoint(r.requested)},
                                 {"certified", format_cpoint(r.certified)},
                                 {"f_true", {r.f_true.real(), r.f_true.imag()}},
                                 {"f_hat", {r.f_hat.real(), r.f_hat.imag()}},
                                 {"abs_err", r.abs_err},
                                 {"rel_err", r.rel_err},
                                 {"fit_residual", r.fit_residual},
                                 {"order_estimate", r.order_estimate},
                                 {"critical_points", r.critical_points},
                                 {"flag", r.flag}});
        }
        int failed = 0;
        for (const auto& r : rows)
            if (r.flag != "ok") ++failed;
        return {{"schema", schema},
                {"csv_header", kCsvHeader},
                {"n", cfg.n},
                {"potential", cfg.potential},
                {"potential_scale", cfg.scale},
                {"seed", cfg.seed},
                {"epsilon", cfg.epsilon},
                {"h_schedule", cfg.h_schedule},
                {"density", {{"kind", cfg.density_kind},
                             {"width", cfg.density_width},
                             {"center", cfg.density_center},
                             {"factor", cfg.density_kind == "bump-poly" ? cfg.density_factor : ""}}},
                {"targets", rows.size()},
                {"failed", failed},
                {"global_rms_rel", global_rms_rel},
                {"rows", rows_json}};
    }
};

/// Write content to path atomically (temp file + rename).
inline void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open '" + tmp + "' for writing");
        os << content;
    }
    std::filesystem::rename(tmp, path);
}

inline int thread_cap_from_env() {
    const char* v = std::getenv("CGO_KAHLER_THREADS");
    if (!v) return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    int k = std::atoi(v);
    return k >= 1 ? k : 1;
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

/// Full recovery pipeline for one target: recentered coordinate charts ->
/// build_phase -> perturb_to_morse -> amplitude with zeros at the other
/// critical points -> h-extrapolated recovery.
inline TargetRow recover_one_target(const ExperimentConfig& cfg, const DomainBox& dom,
                                    const KahlerPotential& F, const TestDensity& density,
                                    const SmoothField& field, const CPoint& target, int index) {
    TargetRow row;
    row.index = index;
    row.requested = target;
    row.certified = target;
    try {
        std::vector<HoloPoly> charts;
        for (int j = 0; j < cfg.n; ++j) charts.push_back(HoloPoly::coordinate(cfg.n, j));
        Phase phase0 = build_phase(target, charts);
        MorsePhase mp = perturb_to_morse(phase0, dom, cfg.epsilon, derive_seed(cfg.seed, index),
                                         cfg.retries, cfg.grid_density);
        const CPoint& anchor = mp.phase.anchor;
        row.certified = anchor;
        row.critical_points = static_cast<int>(mp.critical_points.size());

        std::vector<CPoint> others;
        for (const auto& cp : mp.critical_points.points)
            if (distance(cp.location, anchor) >= mp.critical_points.r_min)
                others.push_back(cp.location);
        Amplitude amp = build_amplitude(anchor, others);
        if (amp.eval(anchor) != Complex(1.0))
            throw Error("amplitude normalization violated");
        for (const auto& q : others)
            if (std::abs(amp.eval(q)) > 1e-12)
                throw Error("amplitude separation violated");

        Recovery rec = recover_point_value(field, mp.phase, amp, F, dom, cfg.h_schedule,
                                           cfg.make_quadrature());
        row.f_hat = rec.f_hat;
        row.fit_residual = rec.fit_residual;
        row.order_estimate = rec.order_estimate;
        row.f_true = density.value(anchor);
        row.abs_err = std::abs(row.f_hat - row.f_true);
    } catch (const Error& e) {
        row.flag = e.what();
        row.f_hat = {0, 0};
        row.abs_err = 0;
        row.rel_err = 0;
    }
    return row;
}

inline RecoveryReport run_recovery_sweep(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    cfg.validate();
    DomainBox dom = cfg.make_domain();
    KahlerPotential F = cfg.make_potential();
    TestDensity density = cfg.make_density();
    SmoothField field = density.field();
    std::vector<CPoint> targets = cfg.make_targets();

    RecoveryReport report;
    report.rows.resize(targets.size());

    int threads = std::min<int>(thread_cap_from_env(), static_cast<int>(targets.size()));
    if (threads <= 1) {
        for (std::size_t i = 0; i < targets.size(); ++i)
            report.rows[i] =
                recover_one_target(cfg, dom, F, density, field, targets[i], static_cast<int>(i));
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= targets.size()) break;
                    report.rows[i] = recover_one_target(cfg, dom, F, density, field, targets[i],
                                                        static_cast<int>(i));
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // error aggregation over ok rows; rel_err floored so every entry is finite
    double fmax = 0;
    for (const auto& r : report.rows)
        if (r.flag == "ok") fmax = std::max(fmax, std::abs(r.f_true));
    double num = 0, den = 0;
    for (auto& r : report.rows) {
        if (r.flag != "ok") continue;
        double floor = std::max(1e-6 * fmax, 1e-300);
        r.rel_err = r.abs_err / std::max(std::abs(r.f_true), floor);
        num += r.abs_err * r.abs_err;
        den += std::norm(r.f_true);
    }
    report.global_rms_rel = den > 0 ? std::sqrt(num / den) : std::sqrt(num);

    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

/// Run the sweep and write the CSV/JSON artifacts atomically. The files are
/// byte-identical across reruns with the same config and seed (runtime is
/// deliberately excluded).
inline RecoveryReport run_and_write(const ExperimentConfig& cfg) {
    RecoveryReport report = run_recovery_sweep(cfg);
    atomic_write(cfg.out_csv, report.to_csv());
    atomic_write(cfg.out_json, report.to_json_summary(cfg).dump(2) + "\n");
    return report;
}

} // namespace cgok

#endif // CGOK_HARNESS_HPP
