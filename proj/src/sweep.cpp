#include "ringpair/sweep.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace ringpair {

namespace {

bool strictly_increasing_in_01(const std::vector<double>& v) {
    if (v.empty()) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] > 0.0) || !(v[i] < 1.0)) return false;
        if (i > 0 && !(v[i] > v[i - 1])) return false;
    }
    return true;
}

}  // namespace

void SweepSpec::validate() const {
    if (!strictly_increasing_in_01(kappa2_sq_range)
        || !strictly_increasing_in_01(kappa_mzi_sq_range))
        throw std::invalid_argument(
            "SweepSpec: coupling ranges must be non-empty, strictly increasing, in (0,1)");
    base.validate();
    pump.validate();
    if (optimize_pump && pump_grid_pm.empty())
        throw std::invalid_argument("SweepSpec: pump optimization needs a candidate grid");
}

std::vector<double> default_pump_grid_pm() {
    std::vector<double> g(17);
    for (int i = 0; i < 17; ++i) g[i] = 200.0 * std::pow(10.0, i / 16.0);
    return g;
}

SweepResult sweep(const SweepSpec& spec) {
    spec.validate();

    // everything the cells share: the grid span (single-ring linewidth) and
    // one reference JSA per candidate pump width, both from the decoupled ring
    MoleculeParams ref = spec.base;
    ref.kappa2_sq = 0.0;
    ref.kappa_mzi_sq = 0.0;
    const double fwhm_sr = single_ring_signal_fwhm(spec.base, spec.pump.center_nm);
    const auto [ref_sig, ref_idl] =
        device_jsa_grids(ref, spec.pump.center_nm, fwhm_sr);

    std::vector<double> pump_widths =
        spec.optimize_pump ? spec.pump_grid_pm : std::vector<double>{spec.pump.fwhm_pm};
    std::vector<JointSpectrum> refs(pump_widths.size());
    for (std::size_t k = 0; k < pump_widths.size(); ++k) {
        PumpPulse pp = spec.pump;
        pp.fwhm_pm = pump_widths[k];
        refs[k] = build_jsa(ref, pp, ref_sig, ref_idl);
    }

    SweepResult out;
    out.n_kappa2 = static_cast<int>(spec.kappa2_sq_range.size());
    out.n_kappa_mzi = static_cast<int>(spec.kappa_mzi_sq_range.size());
    out.pump_optimized = spec.optimize_pump;
    out.cells.resize(spec.kappa2_sq_range.size() * spec.kappa_mzi_sq_range.size());

    auto run_cell = [&](std::size_t idx) {
        SweepCell& cell = out.cells[idx];
        cell.kappa2_sq = spec.kappa2_sq_range[idx / spec.kappa_mzi_sq_range.size()];
        cell.kappa_mzi_sq = spec.kappa_mzi_sq_range[idx % spec.kappa_mzi_sq_range.size()];
        try {
            MoleculeParams p = spec.base;
            p.kappa2_sq = cell.kappa2_sq;
            p.kappa_mzi_sq = cell.kappa_mzi_sq;
            const auto [sig, idl] = device_jsa_grids(p, spec.pump.center_nm, fwhm_sr);
            cell.signal_fwhm_sim_pm = dip_fwhm(p, sig.center_nm) * 1e3;

            for (std::size_t k = 0; k < pump_widths.size(); ++k) {
                PumpPulse pp = spec.pump;
                pp.fwhm_pm = pump_widths[k];
                const JointSpectrum j = build_jsa(p, pp, sig, idl);
                const double purity = schmidt_purity(j).purity;
                if (k == 0 || purity > cell.purity) {
                    cell.purity = purity;
                    cell.relative_brightness = relative_brightness(j, refs[k]);
                    cell.pump_fwhm_sim_pm = pump_widths[k];
                    cell.jsi_purity_gap = jsi_purity_gap(j);
                }
            }
            cell.ok = true;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
    };

    int threads = spec.threads > 0
        ? spec.threads
        : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    if (threads == 1 || out.cells.size() == 1) {
        for (std::size_t i = 0; i < out.cells.size(); ++i) run_cell(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < out.cells.size(); i += threads) run_cell(i);
            });
        for (auto& th : pool) th.join();
    }
    return out;
}

SelectedDesign select_design(const SweepResult& grid, double min_purity) {
    if (grid.cells.empty())
        throw std::invalid_argument("select_design: empty sweep grid");
    SelectedDesign best;
    for (const SweepCell& c : grid.cells) {
        if (!c.ok || c.purity < min_purity) continue;
        if (!best.found || c.relative_brightness > best.cell.relative_brightness
            || (c.relative_brightness == best.cell.relative_brightness
                && c.kappa2_sq > best.cell.kappa2_sq)) {
            best.found = true;
            best.cell = c;
        }
    }
    return best;
}

}  // namespace ringpair
