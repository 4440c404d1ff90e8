#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ringpair/analysis.hpp"
#include "ringpair/coupler.hpp"
#include "ringpair/io.hpp"
#include "ringpair/jsa.hpp"
#include "ringpair/molecule.hpp"
#include "ringpair/sweep.hpp"

namespace fs = std::filesystem;
using namespace ringpair;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("scan axis needs at least one point");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

std::string out_path(const fs::path& dir, const char* name) {
    return (dir / name).string();
}

int run_spectrum(const io::RunConfig& cfg, const fs::path& out) {
    const FieldSolution sol = solve_fields(cfg.device, cfg.grid);
    std::vector<double> t2(cfg.grid.points);
    for (int i = 0; i < cfg.grid.points; ++i) t2[i] = std::norm(sol.e_out.values[i]);
    const auto res = find_resonances(cfg.grid, t2);
    io::write_file(out_path(out, "spectrum.csv"), io::spectrum_csv(cfg.grid, sol));
    io::write_file(out_path(out, "resonances.json"), io::resonances_json(res));
    std::cout << "spectrum.csv, resonances.json: " << res.size() << " resonances\n";
    return 0;
}

int run_jsa(const io::RunConfig& cfg, const fs::path& out) {
    JointSpectrum j;
    if (cfg.jsa.enabled) {
        ResonanceGrid sig, idl;
        sig.center_nm = cfg.jsa.signal_center_nm;
        sig.half_span_rad_ps = cfg.jsa.half_span_rad_ps;
        sig.points = cfg.jsa.points;
        idl = sig;
        idl.center_nm = cfg.jsa.idler_center_nm;
        j = build_jsa(cfg.device, cfg.pump, sig, idl);
    } else {
        j = build_device_jsa(cfg.device, cfg.pump);
    }
    const SchmidtResult s = schmidt_purity(j);
    const double gap = jsi_purity_gap(j);
    io::write_file(out_path(out, "jsi.csv"), io::jsi_csv(j));
    io::write_file(out_path(out, "jsa.json"), io::jsa_report_json(j, s, gap));
    std::cout << "jsi.csv, jsa.json: purity " << s.purity << ", phase gap " << gap << "\n";
    return 0;
}

int run_sweep(const io::RunConfig& cfg, const fs::path& out, int threads) {
    SweepSpec spec = cfg.sweep;
    spec.threads = threads;
    const SweepResult r = sweep(spec);
    const SelectedDesign sel = select_design(r, cfg.min_purity);
    io::write_file(out_path(out, "sweep.csv"), io::sweep_csv(r));
    io::write_file(out_path(out, "design.json"), io::design_json(r, sel, cfg.min_purity));

    std::size_t ok = 0;
    for (const auto& c : r.cells) ok += c.ok;
    std::cout << "sweep.csv, design.json: " << ok << "/" << r.cells.size()
              << " cells ok, selected "
              << (sel.found ? "kappa2_sq=" + io::format_double(sel.cell.kappa2_sq)
                                  + " kappa_mzi_sq=" + io::format_double(sel.cell.kappa_mzi_sq)
                            : std::string("none"))
              << "\n";
    if (ok * 10 < r.cells.size() * 9) {
        std::cerr << "error: more than 10% of sweep cells failed\n";
        return 3;
    }
    return 0;
}

int run_coupler_scan(const io::RunConfig& cfg, const fs::path& out) {
    const auto& cs = cfg.coupler_scan;
    const auto ls = linspace(cs.l_s_min_um, cs.l_s_max_um, cs.l_s_points);
    const auto th = linspace(cs.theta_min_rad, cs.theta_max_rad, cs.theta_points);
    const DesignSpaceScan s =
        design_space_scan(ls, th, cs.gap_nm, cs.r_um, cs.bent_fraction, cfg.coupler_model);
    io::write_file(out_path(out, "coupler_scan.csv"), io::coupler_csv(s));
    io::write_file(out_path(out, "coupler_contours.json"),
                   io::coupler_contours_json(s, cs.gap_nm, cs.r_um));
    std::cout << "coupler_scan.csv, coupler_contours.json: " << s.grid.size()
              << " grid points, " << s.contours.size() << " contours\n";
    return 0;
}

int run_analyze(const io::RunConfig& cfg, const fs::path& out, std::uint64_t seed) {
    if (cfg.io.power_series_csv.empty())
        throw std::invalid_argument("analyze: config needs io.power_series_csv");
    const PowerSeries data =
        io::read_power_series(cfg.io.power_series_csv, cfg.analysis.coincidence_window_s);
    const BrightnessFit fit = fit_brightness(data, cfg.analysis.weighting);
    const auto car = car_curve(data);

    IntrinsicHeralding heralding;
    bool have_heralding = false;
    if (!cfg.io.loss_budget_json.empty()) {
        const auto [budget_s, budget_i] = io::read_loss_budgets(cfg.io.loss_budget_json);
        heralding = intrinsic_heralding(fit, budget_s, budget_i);
        have_heralding = true;
    }

    io::JsiReport jsi;
    bool have_jsi = false;
    if (!cfg.io.jsi_csv.empty()) {
        const MeasuredJsi raw = io::read_measured_jsi(cfg.io.jsi_csv);
        const MeasuredJsi binned = supersample_jsi(raw, cfg.analysis.jsi_bin_pm);
        jsi.native_purity = jsi_purity(raw);
        jsi.supersampled_purity = jsi_purity(binned);
        jsi.bin_pm = cfg.analysis.jsi_bin_pm;
        jsi.noise_sigma = cfg.analysis.mc_noise_sigma >= 0.0
            ? cfg.analysis.mc_noise_sigma
            : jsi_noise_sigma(binned);
        jsi.mc = monte_carlo_purity(binned, jsi.noise_sigma, cfg.analysis.mc_trials, seed);
        jsi.mc_trials = cfg.analysis.mc_trials;
        have_jsi = true;
    }

    io::write_file(out_path(out, "analysis.json"),
                   io::analysis_report_json(fit, cfg.analysis.weighting,
                                            have_heralding ? &heralding : nullptr,
                                            have_jsi ? &jsi : nullptr));
    io::write_file(out_path(out, "car.csv"), io::car_csv(car));
    std::cout << "analysis.json, car.csv: gamma_eff " << fit.gamma_eff_hz_mw2
              << " Hz/mW^2, eta_s " << fit.eta_s << ", eta_i " << fit.eta_i << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"design and analysis toolkit for ring-resonator photon-pair sources"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    int threads = 0;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_dir, "output directory (must exist)");
    app.add_option("--seed", seed, "Monte-Carlo seed");
    app.add_option("--threads", threads, "sweep worker threads, 0 = hardware");

    auto* c_spectrum =
        app.add_subcommand("spectrum", "transmission spectrum and resonance list");
    auto* c_jsa = app.add_subcommand("jsa", "joint spectral amplitude and purity");
    auto* c_sweep = app.add_subcommand("sweep", "coupling-space purity/brightness map");
    auto* c_coupler =
        app.add_subcommand("coupler-scan", "directional-coupler design space");
    auto* c_analyze = app.add_subcommand("analyze", "count-rate and JSI re-analysis");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const io::RunConfig cfg =
            config_path.empty() ? io::RunConfig{} : io::load_config(config_path);
        const fs::path out(out_dir);
        if (!fs::is_directory(out))
            throw std::invalid_argument("output directory does not exist: " + out_dir);
        if (c_spectrum->parsed()) return run_spectrum(cfg, out);
        if (c_jsa->parsed()) return run_jsa(cfg, out);
        if (c_sweep->parsed()) return run_sweep(cfg, out, threads);
        if (c_coupler->parsed()) return run_coupler_scan(cfg, out);
        if (c_analyze->parsed()) return run_analyze(cfg, out, seed);
        std::cerr << "error: no command\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
