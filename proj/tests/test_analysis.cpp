#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ringpair/analysis.hpp"
#include "ringpair/rng.hpp"

using namespace ringpair;

namespace {

// Exact pair-source rate model used as the fit oracle:
//   C_x  = gamma eta_x P^2 + beta_x P + DC,  C_cc = gamma eta_s eta_i P^2 + ACC
struct RateModel {
    double gamma = 4.4e6;  // pairs Hz/mW^2
    double eta_s = 0.072, eta_i = 0.056;
    double beta_s = 200.0, beta_i = 200.0;  // linear background Hz/mW
    double dark = 150.0;
    double dt = 1e-9;

    PowerSeries series(const std::vector<double>& powers_mw) const {
        PowerSeries d;
        d.coincidence_window_s = dt;
        for (double p : powers_mw) {
            PowerPoint r;
            r.p_mw = p;
            r.ci_hz = gamma * eta_i * p * p + beta_i * p + dark;
            r.cs_hz = gamma * eta_s * p * p + beta_s * p + dark;
            r.ccc_hz = gamma * eta_s * eta_i * p * p + r.ci_hz * r.cs_hz * dt;
            d.rows.push_back(r);
        }
        return d;
    }
};

std::vector<double> power_ladder(int n, double step = 0.02) {
    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) p[i] = step * (i + 1);
    return p;
}

MeasuredJsi separable_jsi(int ns, int ni, double step_s_pm, double step_i_pm,
                          double width_pm) {
    MeasuredJsi j;
    j.signal_nm.resize(ns);
    j.idler_nm.resize(ni);
    j.intensity.resize(ns, ni);
    for (int s = 0; s < ns; ++s)
        j.signal_nm[s] = 1550.0 + (s - ns / 2) * step_s_pm * 1e-3;
    for (int i = 0; i < ni; ++i)
        j.idler_nm[i] = 1551.3 + (i - ni / 2) * step_i_pm * 1e-3;
    for (int s = 0; s < ns; ++s) {
        const double ds = (s - ns / 2) * step_s_pm;
        for (int i = 0; i < ni; ++i) {
            const double di = (i - ni / 2) * step_i_pm;
            j.intensity(s, i) = std::exp(-(ds * ds + di * di) / (2.0 * width_pm * width_pm));
        }
    }
    return j;
}

}  // namespace

TEST_CASE("power series validation") {
    RateModel m;
    PowerSeries d = m.series(power_ladder(7));
    d.validate();

    PowerSeries bad = d;
    bad.rows[3].p_mw = bad.rows[2].p_mw;  // not strictly increasing
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = d;
    bad.rows[0].ci_hz = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = d;
    bad.coincidence_window_s = -1e-9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(fit_brightness(PowerSeries{}), std::invalid_argument);
    // four points cannot anchor the knee detector
    CHECK_THROWS_AS(fit_brightness(m.series(power_ladder(4))), std::invalid_argument);
}

TEST_CASE("noise-free brightness fit recovers the generating model") {
    RateModel m;
    const PowerSeries d = m.series(power_ladder(7));
    for (FitWeighting w :
         {FitWeighting::poisson, FitWeighting::uniform, FitWeighting::relative}) {
        const BrightnessFit f = fit_brightness(d, w);
        f.validate();
        CHECK(f.gamma_eff_hz_mw2 == doctest::Approx(m.gamma).epsilon(1e-3));
        CHECK(f.eta_s == doctest::Approx(m.eta_s).epsilon(1e-3));
        CHECK(f.eta_i == doctest::Approx(m.eta_i).epsilon(1e-3));
        CHECK(f.beta_s_hz_mw == doctest::Approx(m.beta_s).epsilon(1e-3));
        CHECK(f.beta_i_hz_mw == doctest::Approx(m.beta_i).epsilon(1e-3));
        CHECK(f.dark_hz == doctest::Approx(m.dark).epsilon(1e-3));
        CHECK(f.points_used == 7);
        CHECK(std::isinf(f.knee_mw));
        CHECK(f.covariance.rows() == 6);
    }
}

TEST_CASE("pure quadratic data without backgrounds fits exactly") {
    RateModel m;
    m.beta_s = m.beta_i = m.dark = 0.0;
    const BrightnessFit f = fit_brightness(m.series(power_ladder(6)));
    CHECK(f.gamma_eff_hz_mw2 == doctest::Approx(m.gamma).epsilon(1e-9));
    CHECK(f.eta_s == doctest::Approx(m.eta_s).epsilon(1e-9));
    CHECK(f.eta_i == doctest::Approx(m.eta_i).epsilon(1e-9));
    CHECK(std::abs(f.dark_hz) < 1e-6);
}

TEST_CASE("noisy fit stays inside its own error bars") {
    RateModel m;
    PowerSeries d = m.series(power_ladder(9));
    rng::Stream noise(404, 0);
    for (auto& r : d.rows) {
        r.ci_hz *= 1.0 + 0.01 * noise.normal();
        r.cs_hz *= 1.0 + 0.01 * noise.normal();
        r.ccc_hz *= 1.0 + 0.01 * noise.normal();
    }
    const BrightnessFit f = fit_brightness(d);
    CHECK(f.err_gamma > 0.0);
    CHECK(f.err_eta_s > 0.0);
    CHECK(std::abs(f.gamma_eff_hz_mw2 - m.gamma) < 3.0 * f.err_gamma);
    CHECK(std::abs(f.eta_s - m.eta_s) < 3.0 * f.err_eta_s);
    CHECK(std::abs(f.eta_i - m.eta_i) < 3.0 * f.err_eta_i);
    // error bars should be commensurate with 1% statistics, not orders off
    CHECK(f.err_gamma / m.gamma < 0.1);
    CHECK(f.err_gamma / m.gamma > 1e-4);
}

TEST_CASE("degenerate power spread is reported, not silently fitted") {
    RateModel m;
    std::vector<double> p(6);
    for (int i = 0; i < 6; ++i) p[i] = 1.0 + 1e-10 * i;  // collinear P and P^2
    CHECK_THROWS_AS(fit_brightness(m.series(p)), std::runtime_error);
}

TEST_CASE("TPA knee: suppressed coincidences are detected and excluded") {
    RateModel m;
    PowerSeries d = m.series(power_ladder(10));  // 0.02 .. 0.20 mW
    for (auto& r : d.rows) {
        if (r.p_mw > 0.15) {
            const double acc = r.ci_hz * r.cs_hz * d.coincidence_window_s;
            r.ccc_hz = acc + 0.8 * (r.ccc_hz - acc);  // 20% pair-rate suppression
        }
    }
    const BrightnessFit f = fit_brightness(d);
    CHECK(f.knee_mw == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(f.points_used == 7);
    // the fit ignores the bent rows entirely
    CHECK(f.gamma_eff_hz_mw2 == doctest::Approx(m.gamma).epsilon(1e-3));

    const auto car = car_curve(d);
    REQUIRE(car.size() == 10);
    for (std::size_t i = 0; i < car.size(); ++i)
        CHECK(car[i].tpa_flag == (d.rows[i].p_mw > 0.155));
}

TEST_CASE("CAR arithmetic") {
    PowerSeries d;
    d.coincidence_window_s = 1e-9;
    for (int i = 1; i <= 6; ++i) {
        PowerPoint r;
        r.p_mw = 0.02 * i;
        r.ci_hz = 1e4 * r.p_mw;
        r.cs_hz = 2e4 * r.p_mw;
        const double acc = r.ci_hz * r.cs_hz * d.coincidence_window_s;
        r.ccc_hz = 2.0 * acc;  // CAR of exactly 1
        d.rows.push_back(r);
    }
    auto car = car_curve(d);
    for (const auto& c : car) {
        CHECK(c.car == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(!c.infinite);
    }

    // quadratic pairs over linear-power accidentals: CAR must fall with power
    RateModel m;
    m.beta_s = m.beta_i = 0.0;
    m.dark = 50.0;
    car = car_curve(m.series(power_ladder(8)));
    for (std::size_t i = 1; i < car.size(); ++i) CHECK(car[i].car < car[i - 1].car);

    // zero accidentals: flagged infinite, not NaN
    PowerSeries z = m.series(power_ladder(5));
    z.coincidence_window_s = 0.0;
    car = car_curve(z);
    for (const auto& c : car) {
        CHECK(c.infinite);
        CHECK(std::isinf(c.car));
    }
}

TEST_CASE("unheralded g2 estimator") {
    // 1 MHz singles on both arms at 10 MHz rep, 0.2 MHz coincidences
    CHECK(g2_unheralded(1e6, 1e6, 2e5, 1e7)
          == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(g2_unheralded(0.0, 1e6, 1.0, 1e7), std::invalid_argument);
    CHECK_THROWS_AS(g2_unheralded(1e6, 1e6, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("heralded g2 estimator") {
    CHECK(g2_heralded(1000000, 50000, 50000, 2500)
          == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(g2_heralded(0, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(g2_heralded(10, 0, 1, 1), std::invalid_argument);

    // independent Bernoulli arms behind a herald are uncorrelated: g2 -> 1
    rng::Stream s(99, 0);
    const std::uint64_t n_h = 1000000;
    std::uint64_t ha = 0, hb = 0, hab = 0;
    for (std::uint64_t t = 0; t < n_h; ++t) {
        const bool a = s.uniform() < 0.05;
        const bool b = s.uniform() < 0.05;
        ha += a;
        hb += b;
        hab += a && b;
    }
    CHECK(std::abs(g2_heralded(n_h, ha, hb, hab) - 1.0) < 0.1);
}

TEST_CASE("intrinsic heralding through loss ledgers") {
    BrightnessFit fit;
    fit.eta_s = 0.072;
    fit.eta_i = 0.056;
    fit.err_eta_s = 0.0;
    fit.err_eta_i = 0.0;

    SUBCASE("zero loss is the identity") {
        const auto h = intrinsic_heralding(fit, {}, {});
        CHECK(h.signal.eta_src == doctest::Approx(0.072).epsilon(1e-15));
        CHECK(h.idler.eta_src == doctest::Approx(0.056).epsilon(1e-15));
        CHECK(h.signal.err == doctest::Approx(0.0));
        CHECK(!h.signal.consistency_warning);
    }

    SUBCASE("chip-to-detector ledgers place both channels above 90%") {
        const LossBudget sig = {{"chip-fiber coupler", 3.75, 0.25},
                                {"pump-rejection filters", 5.84, 0.1},
                                {"fiber routing", 0.42, 0.05},
                                {"detector", 1.06, 0.1}};
        const LossBudget idl = {{"chip-fiber coupler", 3.75, 0.25},
                                {"pump-rejection filters", 6.98, 0.1},
                                {"fiber routing", 0.71, 0.05},
                                {"detector", 0.814, 0.1}};
        const auto h = intrinsic_heralding(fit, sig, idl);
        CHECK(h.signal.eta_src == doctest::Approx(0.9211546).epsilon(1e-4));
        CHECK(h.idler.eta_src == doctest::Approx(0.9409988).epsilon(1e-4));
        CHECK(h.signal.err > 0.0);
        CHECK(!h.signal.consistency_warning);
        CHECK(!h.idler.consistency_warning);

        // doubling every ledger uncertainty doubles the propagated error
        LossBudget sig2 = sig, idl2 = idl;
        for (auto& e : sig2) e.err_db *= 2.0;
        for (auto& e : idl2) e.err_db *= 2.0;
        const auto h2 = intrinsic_heralding(fit, sig2, idl2);
        CHECK(h2.signal.err == doctest::Approx(2.0 * h.signal.err).epsilon(1e-12));
        CHECK(h2.idler.err == doctest::Approx(2.0 * h.idler.err).epsilon(1e-12));
    }

    SUBCASE("over-unity result raises the consistency flag") {
        fit.eta_s = 0.5;
        fit.eta_i = 0.05;
        const LossBudget heavy = {{"everything", 6.0, 0.01}};
        const auto h = intrinsic_heralding(fit, heavy, heavy);
        CHECK(h.signal.eta_src == doctest::Approx(0.5 * std::pow(10.0, 0.6)));
        CHECK(h.signal.consistency_warning);  // ~1.99 with tiny error
        CHECK(!h.idler.consistency_warning);
    }

    SUBCASE("negative dB entries are rejected") {
        CHECK_THROWS_AS(intrinsic_heralding(fit, {{"bad", -1.0, 0.0}}, {}),
                        std::invalid_argument);
    }
}

TEST_CASE("measured JSI validation and steps") {
    MeasuredJsi j = separable_jsi(11, 21, 1.0, 0.25, 10.0);
    j.validate();
    CHECK(j.signal_step_pm() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j.idler_step_pm() == doctest::Approx(0.25).epsilon(1e-9));

    MeasuredJsi bad = j;
    bad.intensity(3, 4) = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = j;
    bad.idler_nm[5] = bad.idler_nm[7];  // non-uniform axis
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = j;
    bad.signal_nm.pop_back();  // shape mismatch
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK_THROWS_AS(separable_jsi(2, 21, 1.0, 0.25, 10.0).validate(),
                    std::invalid_argument);
}

TEST_CASE("supersampling") {
    const MeasuredJsi j = separable_jsi(7, 7, 2.0, 2.0, 6.0);

    SUBCASE("bin equal to the native step is the identity") {
        const MeasuredJsi out = supersample_jsi(j, 2.0);
        REQUIRE(out.signal_nm.size() == 7);
        for (int s = 0; s < 7; ++s)
            for (int i = 0; i < 7; ++i)
                CHECK(out.intensity(s, i) == j.intensity(s, i));
    }

    SUBCASE("partial edge cells are dropped, axes are member means") {
        const MeasuredJsi out = supersample_jsi(j, 4.0);
        REQUIRE(out.signal_nm.size() == 3);  // 7 pixels / factor 2, remainder dropped
        REQUIRE(out.idler_nm.size() == 3);
        CHECK(out.signal_nm[0]
              == doctest::Approx(0.5 * (j.signal_nm[0] + j.signal_nm[1])).epsilon(1e-15));
        CHECK(out.intensity(1, 1)
              == doctest::Approx(j.intensity.block(2, 2, 2, 2).mean()).epsilon(1e-15));
    }

    SUBCASE("a constant field stays constant") {
        MeasuredJsi flat = j;
        flat.intensity.setConstant(0.5);
        const MeasuredJsi out = supersample_jsi(flat, 4.0);
        for (int s = 0; s < 3; ++s)
            for (int i = 0; i < 3; ++i) CHECK(out.intensity(s, i) == 0.5);
    }

    SUBCASE("bins below the native step or leaving <3 cells are errors") {
        CHECK_THROWS_AS(supersample_jsi(j, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(supersample_jsi(j, 6.0), std::invalid_argument);
    }

    SUBCASE("asymmetric steps bin by per-axis factors") {
        const MeasuredJsi a = separable_jsi(9, 18, 2.0, 1.0, 6.0);
        const MeasuredJsi out = supersample_jsi(a, 4.0);
        CHECK(out.signal_nm.size() == 4);  // factor 2
        CHECK(out.idler_nm.size() == 4);   // factor 4
        CHECK(out.signal_step_pm() == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(out.idler_step_pm() == doctest::Approx(4.0).epsilon(1e-9));
    }
}

TEST_CASE("pixel noise estimation from neighbour differences") {
    // smooth field: neighbour differences along the fine axis are tiny
    const MeasuredJsi smooth = separable_jsi(41, 3201, 1.0, 0.1, 50.0);
    CHECK(jsi_noise_sigma(smooth) < 0.005);

    // injected 4% multiplicative noise is recovered
    MeasuredJsi noisy = smooth;
    rng::Stream s(7, 0);
    for (Eigen::Index r = 0; r < noisy.intensity.rows(); ++r)
        for (Eigen::Index c = 0; c < noisy.intensity.cols(); ++c)
            noisy.intensity(r, c) *= std::max(0.0, 1.0 + 0.04 * s.normal());
    CHECK(jsi_noise_sigma(noisy) == doctest::Approx(0.04).epsilon(0.125));

    MeasuredJsi zero = smooth;
    zero.intensity.setZero();
    CHECK_THROWS_AS(jsi_noise_sigma(zero), std::invalid_argument);
}

TEST_CASE("purity of a measured JSI") {
    // separable intensity -> rank-1 sqrt -> unit purity
    const MeasuredJsi sep = separable_jsi(21, 21, 1.0, 1.0, 8.0);
    CHECK(jsi_purity(sep) == doctest::Approx(1.0).epsilon(1e-10));

    // frequency-correlated double gaussian: visibly multimode
    MeasuredJsi corr = sep;
    for (int s = 0; s < 21; ++s)
        for (int i = 0; i < 21; ++i) {
            const double ds = (s - 10) * 1.0, di = (i - 10) * 1.0;
            const double u = ds + di, w = ds - di;
            corr.intensity(s, i) =
                std::exp(-u * u / (2.0 * 4.0 * 4.0) - w * w / (2.0 * 16.0 * 16.0));
        }
    const double p = jsi_purity(corr);
    CHECK(p < 0.9);
    CHECK(p > 0.3);
}

TEST_CASE("monte-carlo purity") {
    const MeasuredJsi j = separable_jsi(15, 15, 1.0, 1.0, 5.0);

    SUBCASE("zero noise collapses to the deterministic value") {
        const PurityEstimate e = monte_carlo_purity(j, 0.0, 100, 42);
        CHECK(e.purity == doctest::Approx(jsi_purity(j)).epsilon(1e-15));
        CHECK(e.err == 0.0);
    }

    SUBCASE("trials are reproducible and noise widens the spread") {
        const PurityEstimate a = monte_carlo_purity(j, 0.04, 150, 42);
        const PurityEstimate b = monte_carlo_purity(j, 0.04, 150, 42);
        CHECK(a.purity == b.purity);
        CHECK(a.err == b.err);
        CHECK(a.err > 0.0);
        const PurityEstimate c = monte_carlo_purity(j, 0.12, 150, 42);
        CHECK(c.err > a.err);
        // noise can only smear a rank-1 state downwards
        CHECK(c.purity < 1.0);
    }

    SUBCASE("guard rails") {
        CHECK_THROWS_AS(monte_carlo_purity(j, 0.04, 99, 42), std::invalid_argument);
        CHECK_THROWS_AS(monte_carlo_purity(j, -0.1, 150, 42), std::invalid_argument);
    }
}

TEST_CASE("thermal g2 simulation") {
    SUBCASE("single-mode source doubles the coincidence rate") {
        const auto r = simulate_thermal_g2({1.0}, 0.03, 10000000, 51e6, 6, 10);
        CHECK(std::abs(r.g2 - 2.0) < 0.05);
        CHECK(r.sigma > 0.0);
        CHECK(r.sigma < 0.2);
        // the reported g2 is exactly the estimator applied to its own counts
        CHECK(r.g2 == doctest::Approx(g2_unheralded(r.counts.c_a_hz, r.counts.c_b_hz,
                                                    r.counts.c_ab_hz, 51e6))
                          .epsilon(1e-12));
        CHECK(r.counts.c_ab_hz <= r.counts.c_a_hz);
        CHECK(r.counts.c_ab_hz <= r.counts.c_b_hz);
    }

    SUBCASE("multimode source lands at 1 + sum p_k^2") {
        const std::vector<double> probs = {0.6, 0.3, 0.1};
        const auto r = simulate_thermal_g2(probs, 0.03, 1000000, 51e6, 11, 10);
        CHECK(std::abs(r.g2 - 1.46) < 3.0 * r.sigma);
        CHECK(r.g2 < 1.9);  // clearly distinguishable from single mode
    }

    SUBCASE("bad arguments") {
        CHECK_THROWS_AS(simulate_thermal_g2({}, 0.05, 1000, 51e6, 1, 10),
                        std::invalid_argument);
        CHECK_THROWS_AS(simulate_thermal_g2({1.0}, 0.0, 1000, 51e6, 1, 10),
                        std::invalid_argument);
        CHECK_THROWS_AS(simulate_thermal_g2({1.0}, 0.05, 1000, 51e6, 1, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("heralded g2 simulation: antibunching scales as 2 mu") {
    const double mu = 0.001;
    const auto r = simulate_heralded_g2(mu, 1000000000ULL, 5);
    CHECK(r.g2 == doctest::Approx(2.0 * mu).epsilon(0.2));
    CHECK(r.g2 == doctest::Approx(g2_heralded(r.n_h, r.n_ha, r.n_hb, r.n_hab))
                      .epsilon(1e-15));
    // herald count tracks the occupation probability mu/(1+mu)
    CHECK(double(r.n_h) == doctest::Approx(1e9 * mu / (1.0 + mu)).epsilon(0.01));
    CHECK(r.n_hab < r.n_ha);
    CHECK_THROWS_AS(simulate_heralded_g2(0.0, 1000, 1), std::invalid_argument);
}
