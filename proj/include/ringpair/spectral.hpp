#ifndef RINGPAIR_SPECTRAL_HPP
#define RINGPAIR_SPECTRAL_HPP

#include <complex>
#include <vector>

namespace ringpair {

// speed of light in vacuum, nm/ps (so angular frequencies come out in rad/ps)
inline constexpr double c_nm_ps = 299792.458;

// Uniform wavelength sampling shared by every spectrum-producing operation.
struct WavelengthGrid {
    double start_nm = 1548.0;  // nm
    double stop_nm = 1552.0;   // nm
    int points = 4001;

    void validate() const;
    double step_nm() const { return (stop_nm - start_nm) / (points - 1); }
    double wavelength(int i) const { return start_nm + i * step_nm(); }
};

// Strip-waveguide dispersion/loss model: first-order (group index) dispersion
// about a reference wavelength, plus a flat propagation loss.
struct WaveguideModel {
    double n_eff0 = 2.4;       // effective index at lambda0
    double n_g = 4.2;          // group index
    double alpha_db_cm = 3.0;  // propagation loss, dB/cm
    double lambda0_nm = 1550.0;

    void validate() const;
};

struct ComplexSpectrum {
    WavelengthGrid grid;
    std::vector<std::complex<double>> values;  // field ratio per grid point
};

// k = (2*pi/lambda) * n_eff(lambda), n_eff linearized through the group index.
// Returns rad/nm.
double propagation_constant(const WaveguideModel& w, double lambda_nm);

// Field (not power) transmission factor of a waveguide of given length:
// 10^(-alpha_dB_cm * L_cm / 20). Length is in micrometres.
double loss_transmission(const WaveguideModel& w, double length_um);

// angular frequency <-> wavelength, rad/ps and nm
inline double omega_from_lambda(double lambda_nm) {
    return 2.0 * 3.14159265358979323846 * c_nm_ps / lambda_nm;
}
inline double lambda_from_omega(double omega_rad_ps) {
    return 2.0 * 3.14159265358979323846 * c_nm_ps / omega_rad_ps;
}

// intensity-FWHM conversion: dlambda (pm) around lambda (nm) -> domega (rad/ps)
inline double omega_fwhm_from_pm(double fwhm_pm, double lambda_nm) {
    return 2.0 * 3.14159265358979323846 * c_nm_ps * (fwhm_pm * 1e-3)
        / (lambda_nm * lambda_nm);
}

}  // namespace ringpair

#endif
