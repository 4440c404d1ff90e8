#include "ringpair/analysis.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ringpair/rng.hpp"

namespace ringpair {

namespace {

// Weighted quadratic-only fit of the accidental-subtracted coincidences on
// the first `m` rows, returning (coefficient, rms residual).
std::pair<double, double> quadratic_cc_fit(const PowerSeries& d, std::size_t m) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const auto& r = d.rows[j];
        const double p2 = r.p_mw * r.p_mw;
        const double y = r.ccc_hz - r.ci_hz * r.cs_hz * d.coincidence_window_s;
        num += y * p2;
        den += p2 * p2;
    }
    const double a = num / den;
    double ss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const auto& r = d.rows[j];
        const double y = r.ccc_hz - r.ci_hz * r.cs_hz * d.coincidence_window_s;
        const double e = y - a * r.p_mw * r.p_mw;
        ss += e * e;
    }
    return {a, std::sqrt(ss / m)};
}

// First row index where the coincidences fall > 3 sigma below the quadratic
// fit of the rows before it (the TPA signature); rows.size() when none do.
std::size_t tpa_knee_index(const PowerSeries& d) {
    const std::size_t n = d.rows.size();
    for (std::size_t m = 5; m < n; ++m) {
        const auto [a, s] = quadratic_cc_fit(d, m);
        const auto& r = d.rows[m];
        const double y = r.ccc_hz - r.ci_hz * r.cs_hz * d.coincidence_window_s;
        if (y < a * r.p_mw * r.p_mw - 3.0 * s) return m;
    }
    return n;
}

double equation_weight(double measured_rate, FitWeighting w) {
    const double floor_rate = std::max(measured_rate, 1.0);
    switch (w) {
        case FitWeighting::poisson: return 1.0 / floor_rate;  // var ~ rate
        case FitWeighting::uniform: return 1.0;
        case FitWeighting::relative: return 1.0 / (floor_rate * floor_rate);
    }
    return 1.0;
}

double real_matrix_purity(const Eigen::MatrixXd& a) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    const Eigen::VectorXd s = svd.singularValues();
    double total = 0.0, p2 = 0.0;
    for (int i = 0; i < s.size(); ++i) total += s[i] * s[i];
    for (int i = 0; i < s.size(); ++i) {
        const double p = s[i] * s[i] / total;
        p2 += p * p;
    }
    return p2;
}

double axis_step_pm(const std::vector<double>& axis_nm, const char* name) {
    double mean = (axis_nm.back() - axis_nm.front()) / (axis_nm.size() - 1);
    for (std::size_t i = 0; i + 1 < axis_nm.size(); ++i) {
        const double d = axis_nm[i + 1] - axis_nm[i];
        if (!(d > 0.0) || std::abs(d - mean) > 0.1 * std::abs(mean))
            throw std::invalid_argument(std::string("MeasuredJsi: ") + name
                                        + " axis must increase in near-uniform steps");
    }
    return mean * 1e3;
}

}  // namespace

void PowerSeries::validate() const {
    if (rows.empty()) throw std::invalid_argument("PowerSeries: no rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!(r.p_mw > 0.0))
            throw std::invalid_argument("PowerSeries: powers must be > 0");
        if (i > 0 && !(r.p_mw > rows[i - 1].p_mw))
            throw std::invalid_argument("PowerSeries: powers must be strictly increasing");
        if (r.cs_hz < 0.0 || r.ci_hz < 0.0 || r.ccc_hz < 0.0)
            throw std::invalid_argument("PowerSeries: rates must be >= 0");
    }
    if (coincidence_window_s < 0.0)
        throw std::invalid_argument("PowerSeries: coincidence window must be >= 0");
}

void BrightnessFit::validate() const {
    if (!(gamma_eff_hz_mw2 > 0.0))
        throw std::invalid_argument("BrightnessFit: gamma must be > 0");
    auto ok = [](double e) { return e > 0.0 && e <= 1.0; };
    if (!ok(eta_s) || !ok(eta_i))
        throw std::invalid_argument("BrightnessFit: efficiencies must lie in (0,1]");
}

BrightnessFit fit_brightness(const PowerSeries& data, FitWeighting weighting) {
    data.validate();
    const std::size_t knee = tpa_knee_index(data);
    if (knee < 5)
        throw std::invalid_argument(
            "fit_brightness: needs >= 5 power points below the TPA knee");

    const int rows_used = static_cast<int>(knee);
    const int neq = 3 * rows_used;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(neq, 6);  // (a_i,b_i,a_s,b_s,dc,a_cc)
    Eigen::VectorXd y(neq);
    for (int j = 0; j < rows_used; ++j) {
        const auto& r = data.rows[j];
        const double p = r.p_mw, p2 = p * p;
        const double acc = r.ci_hz * r.cs_hz * data.coincidence_window_s;
        const double wi = std::sqrt(equation_weight(r.ci_hz, weighting));
        const double ws = std::sqrt(equation_weight(r.cs_hz, weighting));
        const double wc = std::sqrt(equation_weight(r.ccc_hz, weighting));
        a(3 * j, 0) = wi * p2;
        a(3 * j, 1) = wi * p;
        a(3 * j, 4) = wi;
        y(3 * j) = wi * r.ci_hz;
        a(3 * j + 1, 2) = ws * p2;
        a(3 * j + 1, 3) = ws * p;
        a(3 * j + 1, 4) = ws;
        y(3 * j + 1) = ws * r.cs_hz;
        a(3 * j + 2, 5) = wc * p2;
        y(3 * j + 2) = wc * (r.ccc_hz - acc);
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0)
        / svd.singularValues()(svd.singularValues().size() - 1);
    if (!std::isfinite(cond) || cond > 1e12)
        throw std::runtime_error(
            "fit_brightness: non-identifiable system, design-matrix condition "
            + std::to_string(cond));
    const Eigen::VectorXd x = svd.solve(y);

    const Eigen::VectorXd resid = y - a * x;
    const double chi2 = resid.squaredNorm();
    const double scale2 = neq > 6 ? chi2 / (neq - 6) : 1.0;

    BrightnessFit fit;
    fit.covariance = (a.transpose() * a).inverse() * scale2;
    fit.residual_norm = std::sqrt(chi2 / neq);
    fit.dt_s = data.coincidence_window_s;
    fit.points_used = rows_used;
    fit.knee_mw = knee < data.rows.size() ? data.rows[knee].p_mw
                                          : std::numeric_limits<double>::infinity();

    const double a_i = x(0), a_s = x(2), a_cc = x(5);
    if (a_i == 0.0 || a_s == 0.0 || a_cc == 0.0)
        throw std::runtime_error("fit_brightness: degenerate quadratic coefficients");
    fit.beta_i_hz_mw = x(1);
    fit.beta_s_hz_mw = x(3);
    fit.dark_hz = x(4);
    fit.gamma_eff_hz_mw2 = a_s * a_i / a_cc;
    fit.eta_s = a_cc / a_i;
    fit.eta_i = a_cc / a_s;

    // delta method on (a_i, a_s, a_cc) = components (0, 2, 5)
    Eigen::Matrix3d sub;
    const int idx[3] = {0, 2, 5};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) sub(r, c) = fit.covariance(idx[r], idx[c]);
    auto propagate = [&](const Eigen::Vector3d& g) {
        return std::sqrt(std::max(0.0, double(g.transpose() * sub * g)));
    };
    fit.err_gamma = propagate({a_s / a_cc, a_i / a_cc, -a_s * a_i / (a_cc * a_cc)});
    fit.err_eta_s = propagate({-a_cc / (a_i * a_i), 0.0, 1.0 / a_i});
    fit.err_eta_i = propagate({0.0, -a_cc / (a_s * a_s), 1.0 / a_s});
    return fit;
}

std::vector<CarPoint> car_curve(const PowerSeries& data) {
    data.validate();
    const std::size_t knee = tpa_knee_index(data);
    std::vector<CarPoint> out;
    out.reserve(data.rows.size());
    for (std::size_t j = 0; j < data.rows.size(); ++j) {
        const auto& r = data.rows[j];
        CarPoint c;
        c.p_mw = r.p_mw;
        c.tpa_flag = j >= knee;
        const double acc = r.ci_hz * r.cs_hz * data.coincidence_window_s;
        if (acc == 0.0) {
            c.infinite = true;
            c.car = std::numeric_limits<double>::infinity();
        } else {
            c.car = (r.ccc_hz - acc) / acc;
        }
        out.push_back(c);
    }
    return out;
}

double g2_unheralded(double c_a_hz, double c_b_hz, double c_ab_hz,
                     double rep_rate_hz) {
    if (!(rep_rate_hz > 0.0))
        throw std::invalid_argument("g2_unheralded: repetition rate must be > 0");
    if (!(c_a_hz > 0.0) || !(c_b_hz > 0.0))
        throw std::invalid_argument("g2_unheralded: zero singles rate");
    return c_ab_hz * rep_rate_hz / (c_a_hz * c_b_hz);
}

double g2_heralded(std::uint64_t n_h, std::uint64_t n_ha, std::uint64_t n_hb,
                   std::uint64_t n_hab) {
    if (n_h == 0) throw std::invalid_argument("g2_heralded: no herald counts");
    if (n_ha == 0 || n_hb == 0)
        throw std::invalid_argument("g2_heralded: zero heralded singles");
    return static_cast<double>(n_hab) * static_cast<double>(n_h)
        / (static_cast<double>(n_ha) * static_cast<double>(n_hb));
}

IntrinsicHeralding intrinsic_heralding(const BrightnessFit& fit,
                                       const LossBudget& budget_signal,
                                       const LossBudget& budget_idler) {
    auto channel = [](double eta_fit, double err_fit, const LossBudget& budget) {
        double total_db = 0.0, var_db = 0.0;
        for (const auto& e : budget) {
            if (e.loss_db < 0.0 || e.err_db < 0.0)
                throw std::invalid_argument(
                    "intrinsic_heralding: budget uses positive dB of loss, errors >= 0");
            total_db += e.loss_db;
            var_db += e.err_db * e.err_db;
        }
        const double transmission = std::pow(10.0, -total_db / 10.0);
        HeraldingEstimate h;
        h.eta_src = eta_fit / transmission;
        const double dlog = std::log(10.0) / 10.0;  // d eta / d dB, relative
        h.err = std::sqrt(std::pow(err_fit / transmission, 2)
                          + std::pow(h.eta_src * dlog, 2) * var_db);
        h.consistency_warning = h.eta_src > 1.0 + h.err;
        return h;
    };
    IntrinsicHeralding out;
    out.signal = channel(fit.eta_s, fit.err_eta_s, budget_signal);
    out.idler = channel(fit.eta_i, fit.err_eta_i, budget_idler);
    return out;
}

void MeasuredJsi::validate() const {
    if (signal_nm.size() < 3 || idler_nm.size() < 3)
        throw std::invalid_argument("MeasuredJsi: needs at least a 3x3 matrix");
    if (intensity.rows() != static_cast<Eigen::Index>(signal_nm.size())
        || intensity.cols() != static_cast<Eigen::Index>(idler_nm.size()))
        throw std::invalid_argument("MeasuredJsi: axis/matrix shape mismatch");
    if ((intensity.array() < 0.0).any())
        throw std::invalid_argument("MeasuredJsi: intensities must be >= 0");
    axis_step_pm(signal_nm, "signal");
    axis_step_pm(idler_nm, "idler");
}

double MeasuredJsi::signal_step_pm() const { return axis_step_pm(signal_nm, "signal"); }
double MeasuredJsi::idler_step_pm() const { return axis_step_pm(idler_nm, "idler"); }

MeasuredJsi supersample_jsi(const MeasuredJsi& j, double bin_pm) {
    j.validate();
    const double step_s = j.signal_step_pm(), step_i = j.idler_step_pm();
    if (bin_pm < step_s * (1.0 - 1e-9) || bin_pm < step_i * (1.0 - 1e-9))
        throw std::invalid_argument(
            "supersample_jsi: bin must be >= the native step on both axes");
    const int fs = static_cast<int>(std::lround(bin_pm / step_s));
    const int fi = static_cast<int>(std::lround(bin_pm / step_i));

    MeasuredJsi out;
    const int ns = static_cast<int>(j.signal_nm.size()) / fs;
    const int ni = static_cast<int>(j.idler_nm.size()) / fi;
    if (ns < 3 || ni < 3)
        throw std::invalid_argument("supersample_jsi: bin leaves fewer than 3 cells");
    out.signal_nm.resize(ns);
    out.idler_nm.resize(ni);
    out.intensity.resize(ns, ni);
    for (int s = 0; s < ns; ++s) {
        double acc = 0.0;
        for (int k = 0; k < fs; ++k) acc += j.signal_nm[s * fs + k];
        out.signal_nm[s] = acc / fs;
    }
    for (int i = 0; i < ni; ++i) {
        double acc = 0.0;
        for (int k = 0; k < fi; ++k) acc += j.idler_nm[i * fi + k];
        out.idler_nm[i] = acc / fi;
    }
    for (int s = 0; s < ns; ++s)
        for (int i = 0; i < ni; ++i)
            out.intensity(s, i) =
                j.intensity.block(s * fs, i * fi, fs, fi).mean();
    return out;
}

double jsi_noise_sigma(const MeasuredJsi& j) {
    j.validate();
    const double peak = j.intensity.maxCoeff();
    if (!(peak > 0.0))
        throw std::invalid_argument("jsi_noise_sigma: all-zero matrix");
    const double threshold = 0.01 * peak;

    const bool idler_fine = j.idler_step_pm() <= j.signal_step_pm();
    double sum2 = 0.0;
    std::size_t count = 0;
    const int n_outer = static_cast<int>(idler_fine ? j.signal_nm.size() : j.idler_nm.size());
    const int n_inner = static_cast<int>(idler_fine ? j.idler_nm.size() : j.signal_nm.size());
    for (int o = 0; o < n_outer; ++o) {
        for (int x = 0; x + 1 < n_inner; ++x) {
            const double i1 = idler_fine ? j.intensity(o, x) : j.intensity(x, o);
            const double i2 = idler_fine ? j.intensity(o, x + 1) : j.intensity(x + 1, o);
            if (i1 < threshold || i2 < threshold) continue;
            const double d = (i2 - i1) / (0.5 * (i1 + i2));
            sum2 += d * d;
            ++count;
        }
    }
    if (count == 0)
        throw std::invalid_argument("jsi_noise_sigma: no pixel pairs above threshold");
    return std::sqrt(sum2 / count) / std::sqrt(2.0);
}

double jsi_purity(const MeasuredJsi& j) {
    j.validate();
    return real_matrix_purity(j.intensity.cwiseSqrt());
}

PurityEstimate monte_carlo_purity(const MeasuredJsi& j, double sigma, int trials,
                                  std::uint64_t seed) {
    j.validate();
    if (trials < 100)
        throw std::invalid_argument("monte_carlo_purity: needs >= 100 trials");
    if (sigma < 0.0)
        throw std::invalid_argument("monte_carlo_purity: sigma must be >= 0");

    std::vector<double> purities(trials);
    Eigen::MatrixXd amp(j.intensity.rows(), j.intensity.cols());
    for (int t = 0; t < trials; ++t) {
        rng::Stream stream(seed, static_cast<std::uint64_t>(t));
        for (Eigen::Index r = 0; r < j.intensity.rows(); ++r)
            for (Eigen::Index c = 0; c < j.intensity.cols(); ++c) {
                const double noisy =
                    std::max(0.0, j.intensity(r, c) * (1.0 + sigma * stream.normal()));
                amp(r, c) = std::sqrt(noisy);
            }
        purities[t] = real_matrix_purity(amp);
    }
    PurityEstimate out;
    for (double p : purities) out.purity += p;
    out.purity /= trials;
    double ss = 0.0;
    for (double p : purities) ss += (p - out.purity) * (p - out.purity);
    out.err = std::sqrt(ss / (trials - 1));
    return out;
}

ThermalSimResult simulate_thermal_g2(const std::vector<double>& schmidt_probs,
                                     double mean_photons, std::uint64_t pulses,
                                     double rep_rate_hz, std::uint64_t seed,
                                     int blocks) {
    if (schmidt_probs.empty() || mean_photons <= 0.0 || pulses == 0 || blocks < 2)
        throw std::invalid_argument("simulate_thermal_g2: bad arguments");

    std::uint64_t tot_a = 0, tot_b = 0, tot_ab = 0;
    std::vector<double> block_g2;
    const std::uint64_t per_block = pulses / blocks;
    for (int bl = 0; bl < blocks; ++bl) {
        rng::Stream stream(seed, static_cast<std::uint64_t>(bl));
        std::uint64_t na = 0, nb = 0, nab = 0;
        const std::uint64_t n_pulses =
            bl + 1 == blocks ? pulses - per_block * (blocks - 1) : per_block;
        for (std::uint64_t t = 0; t < n_pulses; ++t) {
            std::uint64_t n = 0;
            for (double pk : schmidt_probs) n += stream.thermal_photons(mean_photons * pk);
            const std::uint64_t ka = stream.half_binomial(n);
            const std::uint64_t kb = n - ka;
            na += ka >= 1;
            nb += kb >= 1;
            nab += (ka >= 1 && kb >= 1);
        }
        tot_a += na;
        tot_b += nb;
        tot_ab += nab;
        if (na > 0 && nb > 0 && nab > 0)
            block_g2.push_back(static_cast<double>(nab) * n_pulses
                               / (static_cast<double>(na) * nb));
    }

    ThermalSimResult out;
    const double np = static_cast<double>(pulses);
    out.counts.c_a_hz = tot_a * rep_rate_hz / np;
    out.counts.c_b_hz = tot_b * rep_rate_hz / np;
    out.counts.c_ab_hz = tot_ab * rep_rate_hz / np;
    out.g2 = g2_unheralded(out.counts.c_a_hz, out.counts.c_b_hz,
                           out.counts.c_ab_hz, rep_rate_hz);
    double mean = 0.0;
    for (double g : block_g2) mean += g;
    mean /= block_g2.size();
    double ss = 0.0;
    for (double g : block_g2) ss += (g - mean) * (g - mean);
    out.sigma = std::sqrt(ss / (block_g2.size() - 1))
        / std::sqrt(static_cast<double>(block_g2.size()));
    return out;
}

HeraldedSimResult simulate_heralded_g2(double mean_pairs, std::uint64_t pulses,
                                       std::uint64_t seed) {
    if (mean_pairs <= 0.0 || pulses == 0)
        throw std::invalid_argument("simulate_heralded_g2: bad arguments");

    rng::Stream stream(seed, 0);
    // occupied-pulse count: gaussian approximation of Binomial(pulses, q),
    // exact enumeration of the (rare) occupied pulses afterwards
    const double q = mean_pairs / (1.0 + mean_pairs);
    const double mean_occ = static_cast<double>(pulses) * q;
    const double sd_occ = std::sqrt(mean_occ * (1.0 - q));
    const double occ_real = mean_occ + sd_occ * stream.normal();
    const std::uint64_t occupied =
        occ_real <= 0.0 ? 0
                        : std::min(pulses, static_cast<std::uint64_t>(std::llround(occ_real)));

    HeraldedSimResult out;
    out.n_h = occupied;  // herald fires on every occupied pulse
    for (std::uint64_t t = 0; t < occupied; ++t) {
        const std::uint64_t n = stream.thermal_photons_nonzero(mean_pairs);
        const std::uint64_t ka = stream.half_binomial(n);
        const std::uint64_t kb = n - ka;
        out.n_ha += ka >= 1;
        out.n_hb += kb >= 1;
        out.n_hab += (ka >= 1 && kb >= 1);
    }
    out.g2 = g2_heralded(out.n_h, out.n_ha, out.n_hb, out.n_hab);
    return out;
}

}  // namespace ringpair
