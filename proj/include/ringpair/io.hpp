#ifndef RINGPAIR_IO_HPP
#define RINGPAIR_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ringpair/analysis.hpp"
#include "ringpair/coupler.hpp"
#include "ringpair/jsa.hpp"
#include "ringpair/molecule.hpp"
#include "ringpair/sweep.hpp"

namespace ringpair::io {

// shortest decimal representation that round-trips (std::to_chars)
std::string format_double(double v);

// Optional explicit JSA grids; when disabled the device resonances fix them.
struct JsaGridConfig {
    bool enabled = false;
    double signal_center_nm = 0.0;
    double idler_center_nm = 0.0;
    double half_span_rad_ps = 0.0;
    int points = 128;
};

struct CouplerScanConfig {
    double gap_nm = 200.0;
    double r_um = 10.0;
    double bent_fraction = 0.7;
    double l_s_min_um = 0.0;
    double l_s_max_um = 20.0;
    int l_s_points = 81;
    double theta_min_rad = 0.0;
    double theta_max_rad = 1.5707963267948966;
    int theta_points = 65;
};

struct AnalysisConfig {
    double coincidence_window_s = 1e-9;
    FitWeighting weighting = FitWeighting::poisson;
    double jsi_bin_pm = 4.0;
    int mc_trials = 200;
    double mc_noise_sigma = -1.0;  // < 0: estimate from the data
};

struct IoPaths {
    std::string power_series_csv;
    std::string jsi_csv;
    std::string loss_budget_json;
};

struct RunConfig {
    MoleculeParams device = designed_molecule(0.1664951428545866, 0.1664951428545866);
    PumpPulse pump;
    WavelengthGrid grid{1548.0, 1552.0, 4001};
    JsaGridConfig jsa;
    CouplingCoefficientModel coupler_model;
    CouplerScanConfig coupler_scan;
    SweepSpec sweep;
    double min_purity = 0.993;
    AnalysisConfig analysis;
    IoPaths io;
};

// Strict parse: unknown or ill-typed keys throw invalid_argument naming the
// dotted key path; nested physical invariants enforced via the validate()
// hooks of the assembled types.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

PowerSeries read_power_series(const std::string& path, double coincidence_window_s);
MeasuredJsi read_measured_jsi(const std::string& path);
std::pair<LossBudget, LossBudget> read_loss_budgets(const std::string& path);

std::string spectrum_csv(const WavelengthGrid& grid, const FieldSolution& sol);
std::string resonances_json(const std::vector<ResonanceInfo>& res);
std::string jsi_csv(const JointSpectrum& j);
std::string jsa_report_json(const JointSpectrum& j, const SchmidtResult& s, double gap);
std::string sweep_csv(const SweepResult& r);
std::string design_json(const SweepResult& r, const SelectedDesign& sel, double min_purity);
std::string coupler_csv(const DesignSpaceScan& s);
std::string coupler_contours_json(const DesignSpaceScan& s, double gap_nm, double r_um);
std::string car_csv(const std::vector<CarPoint>& curve);
std::string measured_jsi_csv(const MeasuredJsi& j);  // matrix layout, header axes

// Optional JSI re-analysis results for the consolidated report.
struct JsiReport {
    double native_purity = 0.0;
    double supersampled_purity = 0.0;
    double bin_pm = 0.0;
    double noise_sigma = 0.0;
    PurityEstimate mc;
    int mc_trials = 0;
};

// heralding/jsi may be null when the corresponding inputs were not supplied.
std::string analysis_report_json(const BrightnessFit& fit, FitWeighting weighting,
                                 const IntrinsicHeralding* heralding,
                                 const JsiReport* jsi);

void write_file(const std::string& path, const std::string& content);

}  // namespace ringpair::io

#endif
