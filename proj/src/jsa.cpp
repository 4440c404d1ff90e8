#include "ringpair/jsa.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ringpair {

namespace {

// frozen numerical conventions; converged per the grid-refinement tests
constexpr int k_grid_points = 128;
constexpr int k_quad_points = 513;
constexpr double k_span_linewidths = 6.0;   // half-span / single-ring FWHM
constexpr double k_quad_ring_halfwidths = 25.0;
constexpr double k_quad_pump_factor_gauss = 2.2;
constexpr double k_quad_pump_factor_sech = 4.5;  // sech tails decay slower

double quad_pump_factor(PumpShape s) {
    return s == PumpShape::gaussian ? k_quad_pump_factor_gauss
                                    : k_quad_pump_factor_sech;
}

std::vector<double> schmidt_probs_from_svd(const Eigen::MatrixXcd& a) {
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
    const Eigen::VectorXd s = svd.singularValues();
    double total = 0.0;
    for (int i = 0; i < s.size(); ++i) total += s[i] * s[i];
    std::vector<double> p(s.size());
    for (int i = 0; i < s.size(); ++i) p[i] = s[i] * s[i] / total;
    return p;  // BDCSVD returns singular values in descending order
}

}  // namespace

void PumpPulse::validate() const {
    if (!(center_nm > 0.0))
        throw std::invalid_argument("PumpPulse: center must be positive");
    if (!(fwhm_pm > 0.0))
        throw std::invalid_argument("PumpPulse: fwhm must be positive");
}

double pump_amplitude(double detuning_rad_ps, double fwhm_rad_ps, PumpShape shape) {
    if (shape == PumpShape::gaussian) {
        const double sigma = fwhm_rad_ps / (2.0 * std::sqrt(2.0 * std::log(2.0)));
        return std::exp(-detuning_rad_ps * detuning_rad_ps / (4.0 * sigma * sigma));
    }
    // intensity sech^2(x/d0) halves at x = arccosh(sqrt(2)) * d0
    const double d0 = fwhm_rad_ps / (2.0 * 0.8813735870195429);
    return 1.0 / std::cosh(detuning_rad_ps / d0);
}

ComplexSpectrum pump_envelope(const PumpPulse& pulse, const WavelengthGrid& grid) {
    pulse.validate();
    grid.validate();
    if ((grid.stop_nm - grid.start_nm) * 1e3 < 4.0 * pulse.fwhm_pm)
        throw std::invalid_argument("pump_envelope: grid must span >= 4x the pump fwhm");

    const double w0 = omega_from_lambda(pulse.center_nm);
    const double fwhm_w = omega_fwhm_from_pm(pulse.fwhm_pm, pulse.center_nm);
    ComplexSpectrum s;
    s.grid = grid;
    s.values.resize(grid.points);
    double norm2 = 0.0;
    for (int i = 0; i < grid.points; ++i) {
        const double a =
            pump_amplitude(omega_from_lambda(grid.wavelength(i)) - w0, fwhm_w, pulse.shape);
        s.values[i] = a;
        norm2 += a * a;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& v : s.values) v *= inv;
    return s;
}

double JointSpectrum::signal_wavelength(int i) const {
    return lambda_from_omega(omega_from_lambda(signal_center_nm) + detuning_rad_ps[i]);
}

double JointSpectrum::idler_wavelength(int j) const {
    return lambda_from_omega(omega_from_lambda(idler_center_nm) + detuning_rad_ps[j]);
}

double single_ring_signal_fwhm(const MoleculeParams& p, double pump_center_nm) {
    MoleculeParams sr = p;
    sr.kappa2_sq = 0.0;
    sr.kappa_mzi_sq = 0.0;
    const double fsr_nm = pump_center_nm * pump_center_nm
        / (sr.waveguide.n_g * sr.l1_um * 1e3);
    const double center = refine_dip(sr, pump_center_nm - fsr_nm);
    return omega_fwhm_from_pm(dip_fwhm(sr, center) * 1e3, center);
}

std::pair<ResonanceGrid, ResonanceGrid> device_jsa_grids(
    const MoleculeParams& p, double pump_center_nm, double fwhm_sr_rad_ps) {
    const double fsr_nm = pump_center_nm * pump_center_nm
        / (p.waveguide.n_g * p.l1_um * 1e3);
    const double lam_s = refine_dip(p, pump_center_nm - fsr_nm);
    const double w_p = omega_from_lambda(pump_center_nm);
    const double w_s = omega_from_lambda(lam_s);

    ResonanceGrid sig, idl;
    sig.center_nm = lam_s;
    sig.half_span_rad_ps = k_span_linewidths * fwhm_sr_rad_ps;
    sig.points = k_grid_points;
    idl = sig;
    idl.center_nm = lambda_from_omega(2.0 * w_p - w_s);  // energy conservation
    return {sig, idl};
}

std::vector<std::complex<double>> pump_convolution(
    const MoleculeParams& p, const PumpPulse& pulse,
    const std::vector<double>& sum_detunings_rad_ps, double ring_fwhm_rad_ps) {
    p.validate();
    pulse.validate();
    if (!(ring_fwhm_rad_ps > 0.0))
        throw std::invalid_argument("pump_convolution: ring linewidth must be > 0");

    const double w_p0 = omega_from_lambda(pulse.center_nm);
    const double fwp_w = omega_fwhm_from_pm(pulse.fwhm_pm, pulse.center_nm);
    // quadrature window: covers the ring response far into its tails plus the
    // whole pump support for either shape
    const double v_half = k_quad_ring_halfwidths * ring_fwhm_rad_ps
        + quad_pump_factor(pulse.shape) * fwp_w;
    const double dv = 2.0 * v_half / (k_quad_points - 1);

    double anorm2 = 0.0;
    for (int q = 0; q < k_quad_points; ++q) {
        const double v = -v_half + q * dv;
        const double a = pump_amplitude(v, fwp_w, pulse.shape);
        anorm2 += (q == 0 || q == k_quad_points - 1 ? 0.5 : 1.0) * a * a * dv;
    }

    std::vector<std::complex<double>> phi(sum_detunings_rad_ps.size());
    for (std::size_t kk = 0; kk < phi.size(); ++kk) {
        const double half_sum = 0.5 * sum_detunings_rad_ps[kk];
        std::complex<double> acc = 0.0;
        for (int q = 0; q < k_quad_points; ++q) {
            const double v = -v_half + q * dv;
            const std::complex<double> g1 = pump_amplitude(half_sum + v, fwp_w, pulse.shape)
                * solve_point(p, lambda_from_omega(w_p0 + half_sum + v)).e_ins1;
            const std::complex<double> g2 = pump_amplitude(half_sum - v, fwp_w, pulse.shape)
                * solve_point(p, lambda_from_omega(w_p0 + half_sum - v)).e_ins1;
            acc += (q == 0 || q == k_quad_points - 1 ? 0.5 : 1.0) * g1 * g2 * dv;
        }
        phi[kk] = acc / anorm2;
    }
    return phi;
}

JointSpectrum build_jsa(const MoleculeParams& p, const PumpPulse& pulse,
                        const ResonanceGrid& signal, const ResonanceGrid& idler) {
    p.validate();
    pulse.validate();
    if (signal.points < 2 || idler.points < 2)
        throw std::invalid_argument("build_jsa: grids need at least 2 points");
    if (signal.points != idler.points
        || std::abs(signal.half_span_rad_ps - idler.half_span_rad_ps)
            > 1e-9 * signal.half_span_rad_ps)
        throw std::invalid_argument(
            "build_jsa: signal and idler grids must share step and span");

    const double w_p0 = omega_from_lambda(pulse.center_nm);
    const double w_s0 = omega_from_lambda(signal.center_nm);
    const double w_i0 = omega_from_lambda(idler.center_nm);
    if (std::abs(w_s0 + w_i0 - 2.0 * w_p0) > signal.step())
        throw std::invalid_argument(
            "build_jsa: grid centres violate energy conservation 2w_p = w_s + w_i "
            "by more than one grid step");

    const int n = signal.points;
    const double w_half = signal.half_span_rad_ps;
    const double h = signal.step();

    Eigen::VectorXcd fe_s(n), fe_i(n);
    for (int i = 0; i < n; ++i) {
        fe_s[i] = solve_point(p, lambda_from_omega(w_s0 + signal.detuning(i))).e_ins1;
        fe_i[i] = solve_point(p, lambda_from_omega(w_i0 + idler.detuning(i))).e_ins1;
    }

    // Phi on the 2n-1 values taken by ds + di
    const double ring_hw = w_half / k_span_linewidths;  // one single-ring FWHM
    std::vector<double> sums(2 * n - 1);
    for (int kk = 0; kk < 2 * n - 1; ++kk) sums[kk] = -2.0 * w_half + kk * h;
    const std::vector<std::complex<double>> phi =
        pump_convolution(p, pulse, sums, ring_hw);

    JointSpectrum j;
    j.signal_center_nm = signal.center_nm;
    j.idler_center_nm = idler.center_nm;
    j.pump_center_nm = pulse.center_nm;
    j.pump_fwhm_pm = pulse.fwhm_pm;
    j.pump_shape = pulse.shape;
    j.detuning_rad_ps.resize(n);
    for (int i = 0; i < n; ++i) j.detuning_rad_ps[i] = signal.detuning(i);

    j.amplitude.resize(n, n);
    double frob2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj) {
            const std::complex<double> a = fe_s[i] * fe_i[jj] * phi[i + jj];
            j.amplitude(i, jj) = a;
            frob2 += std::norm(a);
        }
    j.raw_strength = std::sqrt(frob2);
    j.amplitude /= j.raw_strength;
    j.normalized = true;
    return j;
}

JointSpectrum build_device_jsa(const MoleculeParams& p, const PumpPulse& pulse) {
    const double fwhm_sr = single_ring_signal_fwhm(p, pulse.center_nm);
    const auto [sig, idl] = device_jsa_grids(p, pulse.center_nm, fwhm_sr);
    return build_jsa(p, pulse, sig, idl);
}

SchmidtResult schmidt_purity(const JointSpectrum& j) {
    if (!j.amplitude.allFinite())
        throw std::invalid_argument("schmidt_purity: non-finite amplitude entries");
    SchmidtResult r;
    r.schmidt_probs = schmidt_probs_from_svd(j.amplitude);
    for (double p : r.schmidt_probs) r.purity += p * p;
    r.schmidt_number = 1.0 / r.purity;
    return r;
}

double jsi_purity_gap(const JointSpectrum& j) {
    const SchmidtResult full = schmidt_purity(j);
    const Eigen::MatrixXcd mag = j.amplitude.cwiseAbs().cast<std::complex<double>>();
    double purity_mag = 0.0;
    for (double p : schmidt_probs_from_svd(mag)) purity_mag += p * p;
    return std::abs(full.purity - purity_mag);
}

double relative_brightness(const JointSpectrum& j, const JointSpectrum& ref) {
    if (j.detuning_rad_ps.size() != ref.detuning_rad_ps.size())
        throw std::invalid_argument("relative_brightness: grid size mismatch");
    for (std::size_t i = 0; i < j.detuning_rad_ps.size(); ++i)
        if (std::abs(j.detuning_rad_ps[i] - ref.detuning_rad_ps[i])
            > 1e-9 * std::abs(ref.detuning_rad_ps.back()))
            throw std::invalid_argument("relative_brightness: detuning axes differ");
    if (j.pump_shape != ref.pump_shape
        || std::abs(j.pump_fwhm_pm - ref.pump_fwhm_pm) > 1e-9 * ref.pump_fwhm_pm)
        throw std::invalid_argument("relative_brightness: pump settings differ");
    return (j.raw_strength * j.raw_strength) / (ref.raw_strength * ref.raw_strength);
}

}  // namespace ringpair
