#ifndef RINGPAIR_SWEEP_HPP
#define RINGPAIR_SWEEP_HPP

#include <string>
#include <vector>

#include "ringpair/jsa.hpp"
#include "ringpair/molecule.hpp"

namespace ringpair {

// Coupling-space sweep reproducing the purity/brightness maps. The pump can
// either stay fixed (the experiment's single operating point) or be re-tuned
// per cell to the purity-maximizing bandwidth on a fixed candidate grid;
// which mode produced a result is recorded on the output.
struct SweepSpec {
    std::vector<double> kappa2_sq_range;     // strictly increasing, in (0,1)
    std::vector<double> kappa_mzi_sq_range;  // strictly increasing, in (0,1)
    MoleculeParams base;                     // kappa2/kappa_mzi overwritten per cell
    PumpPulse pump;
    bool optimize_pump = true;
    std::vector<double> pump_grid_pm;        // candidate FWHMs when optimizing
    int threads = 0;                         // 0 = hardware concurrency

    void validate() const;
};

struct SweepCell {
    double kappa2_sq = 0.0;
    double kappa_mzi_sq = 0.0;
    double purity = 0.0;
    double relative_brightness = 0.0;
    double pump_fwhm_sim_pm = 0.0;    // pump FWHM the cell was evaluated at
    double signal_fwhm_sim_pm = 0.0;  // simulated signal linewidth of the cell
    double jsi_purity_gap = 0.0;
    bool ok = false;
    std::string error;  // per-cell failures are data, not fatal
};

struct SweepResult {
    std::vector<SweepCell> cells;  // row-major: kappa2 outer, kappa_mzi inner
    int n_kappa2 = 0;
    int n_kappa_mzi = 0;
    bool pump_optimized = false;
};

// 17 candidate pump FWHMs, geometric from 200 pm to 2000 pm. The top end is
// where the quadrature grid is still converged; purity is already within
// 5e-5 of its broad-pump asymptote there.
std::vector<double> default_pump_grid_pm();

SweepResult sweep(const SweepSpec& spec);

struct SelectedDesign {
    bool found = false;
    SweepCell cell;
};

// Brightest cell with purity >= min_purity; ties go to the larger kappa2_sq
// (the more fabrication-tolerant inter-ring coupling).
SelectedDesign select_design(const SweepResult& grid, double min_purity);

}  // namespace ringpair

#endif
