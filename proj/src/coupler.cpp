#include "ringpair/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ringpair {

namespace {

constexpr double k_lambda_ref = 1550.0;  // metrics reference wavelength, nm

double c_straight(const CouplingCoefficientModel& m, double gap_nm, double lambda_nm) {
    return m.c0_rad_um * std::exp(-(gap_nm - m.g_ref_nm) / m.decay_nm)
        * (1.0 + m.slope_per_nm * (lambda_nm - k_lambda_ref));
}

double c_bent(const CouplingCoefficientModel& m, double gap_nm, double lambda_nm) {
    return m.c0_rad_um * std::exp(-(gap_nm - m.g_ref_nm) / m.bent_decay_nm)
        * (1.0 + m.bent_slope_per_nm * (lambda_nm - k_lambda_ref));
}

}  // namespace

void CouplingCoefficientModel::validate() const {
    if (!(c0_rad_um > 0.0))
        throw std::invalid_argument("CouplingCoefficientModel: c0 must be > 0");
    if (!(decay_nm > 0.0) || !(bent_decay_nm > 0.0))
        throw std::invalid_argument("CouplingCoefficientModel: decay lengths must be > 0");
}

void CouplerGeometry::validate() const {
    if (!(gap_nm > 0.0))
        throw std::invalid_argument("CouplerGeometry: gap must be > 0");
    if (l_s_um < 0.0 || theta_rad < 0.0 || r_um < 0.0)
        throw std::invalid_argument("CouplerGeometry: lengths and angle must be >= 0");
    if (bent_fraction < 0.0 || bent_fraction > 1.0)
        throw std::invalid_argument("CouplerGeometry: bent_fraction must lie in [0,1]");
}

double coupler_transmittance(const CouplerGeometry& g,
                             const CouplingCoefficientModel& m,
                             double lambda_nm) {
    const double phi = c_straight(m, g.gap_nm, lambda_nm) * g.l_s_um
        + g.bent_fraction * c_bent(m, g.gap_nm, lambda_nm) * g.r_um * g.theta_rad;
    const double s = std::sin(phi);
    return s * s;
}

CouplerMetrics coupler_metrics(const CouplerGeometry& g,
                               const CouplingCoefficientModel& m) {
    g.validate();
    m.validate();
    CouplerMetrics out;
    out.transmittance = coupler_transmittance(g, m, k_lambda_ref);

    for (int i = 0; i < 11; ++i) {
        CouplerGeometry gi = g;
        gi.gap_nm = g.gap_nm - 50.0 + 10.0 * i;
        const double d = std::abs(coupler_transmittance(gi, m, k_lambda_ref)
                                  - out.transmittance);
        out.gap_sensitivity = std::max(out.gap_sensitivity, d);
    }
    for (int i = 0; i < 36; ++i) {
        const double lam = 1530.0 + i;  // 1530..1565 in 1 nm steps
        const double d = std::abs(coupler_transmittance(g, m, lam) - out.transmittance);
        out.dispersion = std::max(out.dispersion, d);
    }
    return out;
}

DesignSpaceScan design_space_scan(const std::vector<double>& l_s_um,
                                  const std::vector<double>& theta_rad,
                                  double gap_nm, double r_um,
                                  double bent_fraction,
                                  const CouplingCoefficientModel& m) {
    if (l_s_um.empty() || theta_rad.empty())
        throw std::invalid_argument("design_space_scan: empty scan range");

    DesignSpaceScan scan;
    scan.l_s_um = l_s_um;
    scan.theta_rad = theta_rad;

    auto point_at = [&](double ls, double th) {
        CouplerGeometry g;
        g.gap_nm = gap_nm;
        g.l_s_um = ls;
        g.r_um = r_um;
        g.theta_rad = th;
        g.bent_fraction = bent_fraction;
        return ScanPoint{ls, th, coupler_metrics(g, m)};
    };

    scan.grid.reserve(l_s_um.size() * theta_rad.size());
    for (double ls : l_s_um)
        for (double th : theta_rad) scan.grid.push_back(point_at(ls, th));

    auto t_at = [&](std::size_t i, std::size_t j) {
        return scan.grid[i * theta_rad.size() + j].metrics.transmittance;
    };

    // Contours come from sign changes of kappa^2 - target along grid edges;
    // the crossing geometry is linearly interpolated and its metrics evaluated
    // exactly there (metrics are pure functions of geometry, no resampling).
    for (int level = 1; level <= 19; ++level) {
        const double target = 0.05 * level;
        ContourLevel c;
        c.target = target;
        for (std::size_t i = 0; i < l_s_um.size(); ++i) {
            for (std::size_t j = 0; j + 1 < theta_rad.size(); ++j) {
                const double a = t_at(i, j) - target, b = t_at(i, j + 1) - target;
                if (a == 0.0) c.points.push_back(point_at(l_s_um[i], theta_rad[j]));
                if (a * b < 0.0) {
                    const double t = a / (a - b);
                    c.points.push_back(point_at(
                        l_s_um[i], theta_rad[j] + t * (theta_rad[j + 1] - theta_rad[j])));
                }
            }
        }
        for (std::size_t j = 0; j < theta_rad.size(); ++j) {
            for (std::size_t i = 0; i + 1 < l_s_um.size(); ++i) {
                const double a = t_at(i, j) - target, b = t_at(i + 1, j) - target;
                if (a * b < 0.0) {
                    const double t = a / (a - b);
                    c.points.push_back(point_at(
                        l_s_um[i] + t * (l_s_um[i + 1] - l_s_um[i]), theta_rad[j]));
                }
            }
        }
        if (c.points.empty()) continue;
        c.most_tolerant = *std::min_element(
            c.points.begin(), c.points.end(), [](const ScanPoint& x, const ScanPoint& y) {
                return x.metrics.gap_sensitivity < y.metrics.gap_sensitivity;
            });
        scan.contours.push_back(std::move(c));
    }
    return scan;
}

}  // namespace ringpair
