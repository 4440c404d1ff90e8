#ifndef RINGPAIR_JSA_HPP
#define RINGPAIR_JSA_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ringpair/molecule.hpp"
#include "ringpair/spectral.hpp"

namespace ringpair {

enum class PumpShape { gaussian, sech };

struct PumpPulse {
    double center_nm = 1550.0;
    double fwhm_pm = 340.0;      // intensity FWHM
    PumpShape shape = PumpShape::gaussian;
    double rep_rate_hz = 51e6;   // metadata only

    void validate() const;
};

// Unnormalized spectral amplitude at an angular-frequency detuning from the
// pulse centre. Gaussian: exp(-d^2/(4 sigma^2)); sech: 1/cosh(d/d0). Both
// parametrized so |amp|^2 has the requested FWHM.
double pump_amplitude(double detuning_rad_ps, double fwhm_rad_ps, PumpShape shape);

// Flat-phase envelope sampled on a wavelength grid, normalized to a unit
// discrete L2 norm. The grid must span at least 4x the FWHM.
ComplexSpectrum pump_envelope(const PumpPulse& pulse, const WavelengthGrid& grid);

// Uniform angular-frequency detuning axis around one resonance.
struct ResonanceGrid {
    double center_nm = 0.0;
    double half_span_rad_ps = 0.0;
    int points = 128;

    double step() const { return 2.0 * half_span_rad_ps / (points - 1); }
    double detuning(int i) const { return -half_span_rad_ps + i * step(); }
};

struct JointSpectrum {
    double signal_center_nm = 0.0;
    double idler_center_nm = 0.0;
    double pump_center_nm = 0.0;
    double pump_fwhm_pm = 0.0;
    PumpShape pump_shape = PumpShape::gaussian;
    std::vector<double> detuning_rad_ps;  // shared signal/idler axis
    Eigen::MatrixXcd amplitude;           // signal (rows) x idler (cols)
    double raw_strength = 0.0;            // Frobenius norm before normalization
    bool normalized = false;

    double signal_wavelength(int i) const;
    double idler_wavelength(int j) const;
};

struct SchmidtResult {
    std::vector<double> schmidt_probs;  // descending, sums to 1
    double purity = 0.0;                // sum p_i^2
    double schmidt_number = 0.0;        // 1/purity
};

// Phase-matching factor Phi(S) = integral of
// alpha(S/2+v) alpha(S/2-v) FE_p(S/2+v) FE_p(S/2-v) dv (trapezoid, alpha
// L2-normalized on the same window), evaluated at each requested sum-detuning
// S relative to 2 w_pump. ring_fwhm_rad_ps is the single-ring linewidth that
// sizes the quadrature window.
std::vector<std::complex<double>> pump_convolution(
    const MoleculeParams& p, const PumpPulse& pulse,
    const std::vector<double>& sum_detunings_rad_ps, double ring_fwhm_rad_ps);

// A(ds, di) = FE_s(ds) FE_i(di) * Phi(ds + di), with FE = E_ins1 and Phi from
// pump_convolution. The sum ds + di lives on an exact lattice (equal grid
// steps), so Phi is evaluated once per lattice node - no interpolation
// anywhere. Grids must share step/span and satisfy w_s + w_i = 2 w_p within
// one step.
JointSpectrum build_jsa(const MoleculeParams& p, const PumpPulse& pulse,
                        const ResonanceGrid& signal, const ResonanceGrid& idler);

// Convenience: refine the signal dip near pump - FSR, force the idler centre
// to 2 w_p - w_s, span 6 single-ring signal linewidths, 128 points.
JointSpectrum build_device_jsa(const MoleculeParams& p, const PumpPulse& pulse);

// Aligned grids as used by build_device_jsa, reusable across pump widths.
// fwhm_sr_rad_ps is the single-ring signal linewidth that fixes the span.
std::pair<ResonanceGrid, ResonanceGrid> device_jsa_grids(
    const MoleculeParams& p, double pump_center_nm, double fwhm_sr_rad_ps);

// Single-ring (kappa2_sq = 0) signal linewidth of the same primary ring, in
// angular frequency; sets every JSA grid span so device and reference share
// axes.
double single_ring_signal_fwhm(const MoleculeParams& p, double pump_center_nm);

SchmidtResult schmidt_purity(const JointSpectrum& j);

// |P(JSA) - P(|JSA|)|: sensitivity of the purity to the joint spectral phase.
double jsi_purity_gap(const JointSpectrum& j);

// raw_strength(j)^2 / raw_strength(ref)^2. Requires identical detuning axes
// and identical pump settings; the reference is conventionally the same
// primary ring with the auxiliary decoupled.
double relative_brightness(const JointSpectrum& j, const JointSpectrum& ref);

}  // namespace ringpair

#endif
