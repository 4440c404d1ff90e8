#ifndef RINGPAIR_ANALYSIS_HPP
#define RINGPAIR_ANALYSIS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace ringpair {

struct PowerPoint {
    double p_mw = 0.0;    // on-chip average pump power
    double cs_hz = 0.0;   // signal singles rate
    double ci_hz = 0.0;   // idler singles rate
    double ccc_hz = 0.0;  // coincidence rate
};

struct PowerSeries {
    std::vector<PowerPoint> rows;     // strictly increasing in power
    double coincidence_window_s = 0.0;

    void validate() const;
};

enum class FitWeighting { poisson, uniform, relative };

// Joint weighted least squares of
//   C_i  = gamma eta_i P^2 + beta_i P + DC
//   C_s  = gamma eta_s P^2 + beta_s P + DC
//   C_cc = gamma eta_s eta_i P^2 + ACC,   ACC = C_i C_s dt from measured rates
// linear in the six coefficients (a_i, beta_i, a_s, beta_s, DC, a_cc); the
// physical parameters come from the ratio structure gamma = a_s a_i / a_cc,
// eta_s = a_cc / a_i, eta_i = a_cc / a_s.
struct BrightnessFit {
    double gamma_eff_hz_mw2 = 0.0;
    double eta_s = 0.0, eta_i = 0.0;
    double beta_s_hz_mw = 0.0, beta_i_hz_mw = 0.0;
    double dark_hz = 0.0;
    double err_gamma = 0.0, err_eta_s = 0.0, err_eta_i = 0.0;  // delta-method
    Eigen::MatrixXd covariance;  // 6x6, order (a_i, beta_i, a_s, beta_s, DC, a_cc)
    double residual_norm = 0.0;  // weighted RMS residual
    double dt_s = 0.0;
    double knee_mw = 0.0;        // first power where TPA bends C_cc; inf if none
    int points_used = 0;         // rows below the knee

    void validate() const;
};

BrightnessFit fit_brightness(const PowerSeries& data,
                             FitWeighting weighting = FitWeighting::poisson);

struct CarPoint {
    double p_mw = 0.0;
    double car = 0.0;        // (C_cc - ACC) / ACC
    bool infinite = false;   // ACC was zero
    bool tpa_flag = false;   // C_cc sits > 3 sigma below the quadratic fit
};

std::vector<CarPoint> car_curve(const PowerSeries& data);

// Pulsed estimator g2 = (C_AB/R) / ((C_A/R)(C_B/R)).
double g2_unheralded(double c_a_hz, double c_b_hz, double c_ab_hz,
                     double rep_rate_hz);

// Standard four-count heralded estimator g2_h = N_hab N_h / (N_ha N_hb).
double g2_heralded(std::uint64_t n_h, std::uint64_t n_ha, std::uint64_t n_hb,
                   std::uint64_t n_hab);

struct LossEntry {
    std::string label;
    double loss_db = 0.0;  // positive dB of loss
    double err_db = 0.0;
};
using LossBudget = std::vector<LossEntry>;

struct HeraldingEstimate {
    double eta_src = 0.0;
    double err = 0.0;
    bool consistency_warning = false;  // eta_src > 1 beyond its error
};

struct IntrinsicHeralding {
    HeraldingEstimate signal, idler;
};

// Back-propagates the fitted heralding efficiencies through per-channel loss
// ledgers: eta_src = eta_fit / prod 10^(-loss_dB/10), first-order errors.
IntrinsicHeralding intrinsic_heralding(const BrightnessFit& fit,
                                       const LossBudget& budget_signal,
                                       const LossBudget& budget_idler);

struct MeasuredJsi {
    std::vector<double> signal_nm;  // coarse axis (e.g. 1 pm laser scan)
    std::vector<double> idler_nm;   // fine axis (e.g. 0.16 pm OSA)
    Eigen::MatrixXd intensity;      // signal (rows) x idler (cols), >= 0

    void validate() const;
    double signal_step_pm() const;
    double idler_step_pm() const;
};

// Block-average into bin x bin pm cells; partial edge cells are dropped and
// each new axis value is the mean of its members. bin below either native
// step is a usage error; bin equal to the native step is the identity.
MeasuredJsi supersample_jsi(const MeasuredJsi& j, double bin_pm);

// Per-pixel relative noise from neighbour differences along the fine axis,
// restricted to pairs where both pixels clear 1% of the peak. Differences are
// normalized by the local pair mean (multiplicative-noise convention), and
// the sqrt(2) removes the two-sample variance doubling.
double jsi_noise_sigma(const MeasuredJsi& j);

// Schmidt purity of sqrt(JSI) taken as the (phase-free) |JSA| proxy.
double jsi_purity(const MeasuredJsi& j);

struct PurityEstimate {
    double purity = 0.0;
    double err = 0.0;  // sample standard deviation across trials
};

// Perturb each pixel with gaussian multiplicative noise, treat sqrt(JSI) as
// the |JSA| proxy, and collect the Schmidt purity across trials. Each trial
// draws from its own (seed, trial) substream, so results are reproducible
// and order-independent.
PurityEstimate monte_carlo_purity(const MeasuredJsi& j, double sigma,
                                  int trials, std::uint64_t seed);

// --- synthetic photon-statistics sources (oracle inputs for the estimators)

struct SplitCounts {
    double c_a_hz = 0.0, c_b_hz = 0.0, c_ab_hz = 0.0;
};

struct ThermalSimResult {
    double g2 = 0.0;
    double sigma = 0.0;  // spread of per-block estimates
    SplitCounts counts;
};

// Multimode thermal source: each Schmidt mode carries geometrically
// distributed photons with mean mu * p_k, the pulse total is split 50:50
// onto two threshold detectors. Expected g2 -> 1 + sum p_k^2 for small mu.
ThermalSimResult simulate_thermal_g2(const std::vector<double>& schmidt_probs,
                                     double mean_photons, std::uint64_t pulses,
                                     double rep_rate_hz, std::uint64_t seed,
                                     int blocks = 10);

struct HeraldedSimResult {
    double g2 = 0.0;
    std::uint64_t n_h = 0, n_ha = 0, n_hb = 0, n_hab = 0;
};

// Thermal pair source with the idler split 50:50; only occupied pulses are
// simulated (their count is drawn binomially), which keeps mu = 1e-3 with
// billions of pulses tractable. Expected g2_h -> 2 mu for small mu.
HeraldedSimResult simulate_heralded_g2(double mean_pairs, std::uint64_t pulses,
                                       std::uint64_t seed);

}  // namespace ringpair

#endif
