#include "ringpair/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ringpair {

namespace {
constexpr double k_denom_guard = 1e-12;
constexpr std::complex<double> k_i{0.0, 1.0};
}  // namespace

void MoleculeParams::validate() const {
    if (!(l1_um > 0.0) || !(l2_um > 0.0) || !(dl_amzi_um > 0.0))
        throw std::invalid_argument("MoleculeParams: lengths must be > 0");
    auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in01(kappa1_sq) || !in01(kappa2_sq) || !in01(kappa_mzi_sq))
        throw std::invalid_argument("MoleculeParams: power couplings must lie in [0,1]");
    waveguide.validate();
}

double MoleculeParams::kappa1() const { return std::sqrt(kappa1_sq); }
double MoleculeParams::kappa2() const { return std::sqrt(kappa2_sq); }
double MoleculeParams::kappa_mzi() const { return std::sqrt(kappa_mzi_sq); }
double MoleculeParams::r1() const { return std::sqrt(1.0 - kappa1_sq); }
double MoleculeParams::r2() const { return std::sqrt(1.0 - kappa2_sq); }
double MoleculeParams::r_mzi() const { return std::sqrt(1.0 - kappa_mzi_sq); }
double MoleculeParams::r_1l() const { return loss_transmission(waveguide, l1_um); }
double MoleculeParams::r_2l() const { return loss_transmission(waveguide, l2_um); }
double MoleculeParams::r_mzil() const { return loss_transmission(waveguide, dl_amzi_um); }

MoleculeParams designed_molecule(double kappa2_sq, double kappa_mzi_sq,
                                 double alpha_db_cm, double kappa1_sq) {
    MoleculeParams p;
    // resonance order 686 (even, i.e. pump family) at 1550 nm with n_eff 2.4
    p.l1_um = 686.0 * 1550.0 / 2.4 * 1e-3;
    p.l2_um = p.l1_um / 2.0;       // auxiliary FSR twice the primary's
    p.dl_amzi_um = p.l1_um / 2.0;  // AMZI lossy at the pump family, clear otherwise
    p.kappa1_sq = kappa1_sq;
    p.kappa2_sq = kappa2_sq;
    p.kappa_mzi_sq = kappa_mzi_sq;
    p.waveguide.alpha_db_cm = alpha_db_cm;
    return p;
}

std::complex<double> aux_round_trip(const MoleculeParams& p, double k_rad_nm) {
    const double l2 = p.l2_um * 1e3, dl = p.dl_amzi_um * 1e3;  // nm
    const std::complex<double> amzi =
        p.r_mzi() * p.r_mzi()
        - p.kappa_mzi_sq * p.r_mzil() * std::exp(k_i * (k_rad_nm * dl));
    return amzi * p.r_2l() * std::exp(k_i * (k_rad_nm * l2));
}

FieldPoint solve_point(const MoleculeParams& p, double lambda_nm) {
    const double k = propagation_constant(p.waveguide, lambda_nm);
    const double l1 = p.l1_um * 1e3;  // nm
    const double k1 = p.kappa1(), k2 = p.kappa2();
    const double r1 = p.r1(), r2 = p.r2(), r1l = p.r_1l();

    const std::complex<double> e1 = std::exp(k_i * (k * l1));
    const std::complex<double> e1h = std::exp(k_i * (k * l1 / 2.0));
    const std::complex<double> t2 = aux_round_trip(p, k);

    const std::complex<double> d = 1.0 - r1 * r2 * r1l * e1;
    const std::complex<double> den2 =
        d * (1.0 - r2 * t2) + p.kappa2_sq * r1l * r1 * e1 * t2;
    if (std::abs(d) < k_denom_guard || std::abs(den2) < k_denom_guard)
        throw std::runtime_error(
            "solve_point: singular resonance denominator at lambda = "
            + std::to_string(lambda_nm) + " nm");

    FieldPoint f;
    f.e_ins2 = -k1 * k2 * r1l * e1h / den2;
    f.e_ins1 = (k_i * k2 * r1 * e1h * t2 * f.e_ins2 + k_i * k1) / d;
    f.e_out = k_i * k1 * r2 * r1l * e1 * f.e_ins1
        - k1 * k2 * e1h * t2 * f.e_ins2 + r1;
    return f;
}

FieldSolution solve_fields(const MoleculeParams& p, const WavelengthGrid& grid) {
    p.validate();
    grid.validate();
    FieldSolution s;
    s.e_out.grid = s.e_ins1.grid = s.e_ins2.grid = grid;
    s.e_out.values.resize(grid.points);
    s.e_ins1.values.resize(grid.points);
    s.e_ins2.values.resize(grid.points);
    for (int i = 0; i < grid.points; ++i) {
        const FieldPoint f = solve_point(p, grid.wavelength(i));
        s.e_out.values[i] = f.e_out;
        s.e_ins1.values[i] = f.e_ins1;
        s.e_ins2.values[i] = f.e_ins2;
    }
    return s;
}

std::vector<double> transmission_spectrum(const MoleculeParams& p,
                                          const WavelengthGrid& grid) {
    const FieldSolution s = solve_fields(p, grid);
    std::vector<double> t2(grid.points);
    for (int i = 0; i < grid.points; ++i) t2[i] = std::norm(s.e_out.values[i]);
    return t2;
}

std::vector<ResonanceInfo> find_resonances(const WavelengthGrid& grid,
                                           const std::vector<double>& t2) {
    grid.validate();
    if (static_cast<int>(t2.size()) != grid.points)
        throw std::invalid_argument("find_resonances: spectrum/grid size mismatch");

    const int n = grid.points;
    std::vector<int> minima;
    for (int i = 1; i + 1 < n; ++i)
        if (t2[i] < t2[i - 1] && t2[i] < t2[i + 1]) minima.push_back(i);

    std::vector<ResonanceInfo> out;
    for (std::size_t mi = 0; mi < minima.size(); ++mi) {
        const int i = minima[mi];
        // local baseline: highest sample between this dip and its neighbours
        const int lo = (mi == 0) ? 0 : minima[mi - 1];
        const int hi = (mi + 1 == minima.size()) ? n - 1 : minima[mi + 1];
        const double base = std::max(*std::max_element(t2.begin() + lo, t2.begin() + i),
                                     *std::max_element(t2.begin() + i, t2.begin() + hi + 1));
        const double depth = base - t2[i];
        if (!(depth > 1e-3 * base)) continue;  // numerical ripple, not a resonance

        const double half = t2[i] + 0.5 * depth;
        // linear interpolation of the two half-depth crossings
        double left = grid.wavelength(lo), right = grid.wavelength(hi);
        for (int j = i; j > lo; --j) {
            if (t2[j - 1] >= half && t2[j] < half) {
                const double f = (half - t2[j]) / (t2[j - 1] - t2[j]);
                left = grid.wavelength(j) - f * grid.step_nm();
                break;
            }
        }
        for (int j = i; j < hi; ++j) {
            if (t2[j + 1] >= half && t2[j] < half) {
                const double f = (half - t2[j]) / (t2[j + 1] - t2[j]);
                right = grid.wavelength(j) + f * grid.step_nm();
                break;
            }
        }
        ResonanceInfo r;
        r.center_nm = grid.wavelength(i);
        r.fwhm_pm = (right - left) * 1e3;
        r.extinction_db = 10.0 * std::log10(base / std::max(t2[i], 1e-300));
        out.push_back(r);
    }
    return out;  // minima were scanned in ascending order already
}

double escape_efficiency(const MoleculeParams& p) {
    if (!(p.kappa1_sq > 0.0))
        throw std::domain_error("escape_efficiency: kappa1 must be > 0");
    const double a = 1.0 - p.r_1l() * p.r_1l();
    return p.kappa1_sq / (p.kappa1_sq + a);
}

double refine_dip(const MoleculeParams& p, double lambda_guess_nm) {
    auto t2 = [&](double lam) { return std::norm(solve_point(p, lam).e_out); };
    // coarse 1 pm scan over +-0.45 nm
    int best = 0;
    double best_val = t2(lambda_guess_nm - 0.450);
    for (int j = 1; j <= 900; ++j) {
        const double v = t2(lambda_guess_nm - 0.450 + j * 1e-3);
        if (v < best_val) {
            best_val = v;
            best = j;
        }
    }
    double a = lambda_guess_nm - 0.450 + (std::max(best - 2, 0)) * 1e-3;
    double b = lambda_guess_nm - 0.450 + (std::min(best + 2, 900)) * 1e-3;
    for (int it = 0; it < 100; ++it) {
        const double m1 = a + (b - a) / 3.0;
        const double m2 = b - (b - a) / 3.0;
        if (t2(m1) < t2(m2))
            b = m2;
        else
            a = m1;
    }
    return 0.5 * (a + b);
}

double dip_fwhm(const MoleculeParams& p, double center_nm) {
    auto t2 = [&](double lam) { return std::norm(solve_point(p, lam).e_out); };
    const double half = 0.5 * (t2(center_nm) + 1.0);
    double width = 0.0;
    for (double sgn : {-1.0, 1.0}) {
        double w = 0.01;
        while (t2(center_nm + sgn * w) < half && w < 5.0) w *= 2.0;
        double lo = 0.0, hi = w;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (t2(center_nm + sgn * mid) < half)
                lo = mid;
            else
                hi = mid;
        }
        width += 0.5 * (lo + hi);
    }
    return width;
}

}  // namespace ringpair
