#ifndef RINGPAIR_COUPLER_HPP
#define RINGPAIR_COUPLER_HPP

#include <vector>

namespace ringpair {

// Parametric stand-in for a mode solver: coupling strength per unit length
// decays exponentially with gap and varies linearly with wavelength. The bent
// section carries its own decay length and slope; phase mismatch along a bend
// both weakens the coupling (bent_fraction) and flattens its gap/wavelength
// dependence, which is what makes bent couplers the tolerant choice. Setting
// bent_decay = decay and bent_slope = slope recovers a single shared
// coefficient for both sections.
struct CouplingCoefficientModel {
    double c0_rad_um = 0.05235987755982988;  // pi/60: kappa^2=0.5 at 15 um straight, 300 nm gap
    double g_ref_nm = 300.0;                 // gap where c0 is quoted
    double decay_nm = 70.0;                  // straight-section gap decay length
    double slope_per_nm = 0.002;             // straight fractional dC per nm of wavelength
    double bent_decay_nm = 90.0;             // bent-section gap decay length
    double bent_slope_per_nm = -0.0005;      // bent fractional dC per nm of wavelength

    void validate() const;
};

struct CouplerGeometry {
    double gap_nm = 200.0;      // waveguide separation
    double l_s_um = 0.0;        // straight coupled length
    double r_um = 10.0;         // bend radius
    double theta_rad = 0.0;     // swept angle of the bent region
    double bent_fraction = 0.7; // scales bent-section coupling vs straight

    void validate() const;
};

struct CouplerMetrics {
    double transmittance = 0.0;     // kappa^2 at (gap, 1550 nm)
    double gap_sensitivity = 0.0;   // max |d kappa^2| over gap +- 50 nm
    double dispersion = 0.0;        // max |d kappa^2| over 1530-1565 nm vs 1550 nm
};

// Power cross-coupling kappa^2 = sin^2(phi) with accumulated half-phase
// phi = C_s(gap,lambda)*L_s + f*C_b(gap,lambda)*r*theta. Lossless two-port:
// self-coupling r^2 = 1 - kappa^2.
double coupler_transmittance(const CouplerGeometry& g,
                             const CouplingCoefficientModel& m,
                             double lambda_nm);

// Transmittance at 1550 nm plus fabrication (11 gap samples, +-50 nm) and
// c-band (36 wavelength samples, 1530-1565 nm) sensitivities.
CouplerMetrics coupler_metrics(const CouplerGeometry& g,
                               const CouplingCoefficientModel& m);

struct ScanPoint {
    double l_s_um, theta_rad;
    CouplerMetrics metrics;
};

struct ContourLevel {
    double target;                   // iso-transmittance level (multiple of 0.05)
    std::vector<ScanPoint> points;   // edge-interpolated contour crossings
    ScanPoint most_tolerant;         // minimum gap_sensitivity on the contour
};

struct DesignSpaceScan {
    std::vector<double> l_s_um;      // scan axis, ascending
    std::vector<double> theta_rad;   // scan axis, ascending
    std::vector<ScanPoint> grid;     // row-major: l_s outer, theta inner
    std::vector<ContourLevel> contours;
};

// Row-major metric grid over (L_s, theta) at fixed gap, plus iso-transmittance
// contours at every reachable multiple of 0.05 with the most fabrication-
// tolerant geometry on each.
DesignSpaceScan design_space_scan(const std::vector<double>& l_s_um,
                                  const std::vector<double>& theta_rad,
                                  double gap_nm, double r_um,
                                  double bent_fraction,
                                  const CouplingCoefficientModel& m);

}  // namespace ringpair

#endif
