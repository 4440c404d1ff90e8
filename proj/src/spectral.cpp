#include "ringpair/spectral.hpp"

#include <cmath>
#include <stdexcept>

namespace ringpair {

void WavelengthGrid::validate() const {
    if (!(start_nm < stop_nm))
        throw std::invalid_argument("WavelengthGrid: start must be < stop");
    if (points < 2)
        throw std::invalid_argument("WavelengthGrid: needs at least 2 points");
    if (!(start_nm > 0.0))
        throw std::invalid_argument("WavelengthGrid: wavelengths must be positive");
}

void WaveguideModel::validate() const {
    if (!(n_eff0 > 1.0) || n_g < n_eff0)
        throw std::invalid_argument("WaveguideModel: requires n_g >= n_eff0 > 1");
    if (alpha_db_cm < 0.0)
        throw std::invalid_argument("WaveguideModel: loss must be >= 0");
    if (!(lambda0_nm > 0.0))
        throw std::invalid_argument("WaveguideModel: lambda0 must be positive");
}

double propagation_constant(const WaveguideModel& w, double lambda_nm) {
    if (!(lambda_nm > 0.0))
        throw std::domain_error("propagation_constant: lambda must be positive");
    const double n_eff =
        w.n_eff0 - (lambda_nm - w.lambda0_nm) * (w.n_g - w.n_eff0) / w.lambda0_nm;
    return 2.0 * 3.14159265358979323846 * n_eff / lambda_nm;
}

double loss_transmission(const WaveguideModel& w, double length_um) {
    if (length_um < 0.0)
        throw std::domain_error("loss_transmission: length must be >= 0");
    const double length_cm = length_um * 1e-4;
    return std::pow(10.0, -(w.alpha_db_cm * length_cm) / 20.0);
}

}  // namespace ringpair
