#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "xxness/currents.hpp"

using namespace xxness;

namespace {

// Independent scalar oracle for the two-site homogeneous instance (energies 1, 3,
// both end weights 1/2), evaluated in extended precision.
long double two_site_flow_oracle(long double b0, long double bN, bool heat) {
    long double sum = 0.0L;
    for (long double e : {1.0L, 3.0L}) {
        const long double n0 = 1.0L / std::expm1(b0 * e);
        const long double nN = 1.0L / std::expm1(bN * e);
        const long double den = 0.5L * (2.0L * n0 + 1.0L) + 0.5L * (2.0L * nN + 1.0L);
        sum += (heat ? e : 1.0L) * 0.25L * (n0 - nN) / den;
    }
    return (heat ? 2.0L : 4.0L) * M_PIl * sum;
}

} // namespace

TEST_CASE("bath config validation and helpers") {
    CHECK_THROWS_AS(BathConfig::from_temperatures(-1.0, 2.0), InvalidParameterError);
    CHECK_THROWS_AS(BathConfig::from_betas(0.0, 1.0), InvalidParameterError);
    const BathConfig b = BathConfig::from_temperatures(10.0, 5.0, 0.7, 1.2);
    CHECK(b.beta_left == Catch::Approx(0.1));
    CHECK(b.mean_temperature() == Catch::Approx(7.5));
    CHECK(b.equal_smearing());
    const BathConfig s = b.swapped();
    CHECK(s.beta_left == Catch::Approx(0.2));
    CHECK(s.beta_right == Catch::Approx(0.1));
}

TEST_CASE("ness coefficients: structure and occupations") {
    const SpectralData sd = diagonalize(build_krawtchouk(9, 0.3, 0.7));
    const BathConfig bath{0.4, 1.1, 0.9, 1.3, 1.0};
    const NessCoefficients co = ness_coefficients(sd, bath);
    for (int k = 0; k < sd.n_sites(); ++k) {
        CHECK(co.c_left[k] > 0.0);
        CHECK(co.c_tilde_left[k] >= 0.0);
        CHECK(co.d[k] == Catch::Approx(co.weight_left[k] * co.c_left[k] +
                                       co.weight_right[k] * co.c_right[k]));
        CHECK(co.d_tilde[k] < co.d[k]); // complete positivity and sub-half filling
        CHECK(co.occupations[k] > 0.0);
        CHECK(co.occupations[k] < 0.5);
        const double e = sd.energy(k);
        // C~/C = n/(n+1)
        CHECK(co.c_tilde_left[k] / co.c_left[k] ==
              Catch::Approx(bose_occupation(0.4, e) / (bose_occupation(0.4, e) + 1.0)));
    }
}

TEST_CASE("equal temperatures and smearing give Fermi-like occupations") {
    const SpectralData sd = diagonalize(build_homogeneous(11, 2.5));
    const double beta = 0.8;
    const NessCoefficients co = ness_coefficients(sd, BathConfig::from_betas(beta, beta));
    for (int k = 0; k < sd.n_sites(); ++k) {
        const double n = bose_occupation(beta, sd.energy(k));
        CHECK(co.occupations[k] == Catch::Approx(n / (2.0 * n + 1.0)).epsilon(1e-13));
    }
    // n = 1 at beta E = ln 2; occupation n/(2n+1) = 1/3
    const double n1 = bose_occupation(1.0, std::log(2.0));
    CHECK(n1 == Catch::Approx(1.0).epsilon(1e-13));
    CHECK(n1 / (2.0 * n1 + 1.0) == Catch::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("fully decoupled baths are rejected") {
    BathConfig bath = BathConfig::from_betas(0.5, 0.25);
    bath.h_left = bath.h_right = 0.0;
    CHECK_THROWS_AS(bath.validate(), InvalidParameterError);
}

TEST_CASE("one-sided coupling carries no current") {
    const SpectralData sd = diagonalize(build_homogeneous(7, 2.4));
    BathConfig bath = BathConfig::from_betas(0.1, 0.6);
    bath.h_right = 0.0;
    CHECK(spin_flow(sd, bath) == 0.0);
    CHECK(heat_flow(sd, bath) == 0.0);
    const NessCoefficients co = ness_coefficients(sd, bath);
    for (int k = 0; k < sd.n_sites(); ++k) {
        CHECK(std::isfinite(co.occupations[k]));
        // left bath alone thermalizes every mode at beta_left
        const double n = bose_occupation(0.1, sd.energy(k));
        CHECK(co.occupations[k] == Catch::Approx(n / (2 * n + 1)).epsilon(1e-13));
    }
}

TEST_CASE("near-degenerate spectra are flagged in reports") {
    // two almost-decoupled halves give near-degenerate level pairs
    const ChainSpec chain = make_chain({1.0, 1e-13, 1.0}, {0.0, 0.0, 0.0, 0.0}, 2.5);
    const CurrentReport r =
        current_report(diagonalize(chain), BathConfig::from_temperatures(5.0, 2.0));
    CHECK(r.near_degenerate_spectrum);
}

TEST_CASE("decoupled right bath leaves only left terms") {
    const SpectralData sd = diagonalize(build_homogeneous(6, 2.2));
    BathConfig bath = BathConfig::from_betas(0.5, 0.25);
    bath.h_right = 0.0;
    const NessCoefficients co = ness_coefficients(sd, bath);
    for (int k = 0; k < sd.n_sites(); ++k) {
        CHECK(co.d[k] == Catch::Approx(co.weight_left[k] * co.c_left[k]));
        CHECK(co.c_right[k] == 0.0);
    }
}

TEST_CASE("two-site spin and heat flows match the frozen instance") {
    const SpectralData sd = diagonalize(build_homogeneous(2, 2.0));
    const BathConfig bath = BathConfig::from_betas(0.1, 0.2);
    const double spin = spin_flow(sd, bath);
    const double heat = heat_flow(sd, bath);
    CHECK(spin == Catch::Approx(0.65578 * M_PI).epsilon(2e-5));
    CHECK(spin == Catch::Approx(double(two_site_flow_oracle(0.1L, 0.2L, false))).epsilon(1e-13));
    CHECK(heat == Catch::Approx(double(two_site_flow_oracle(0.1L, 0.2L, true))).epsilon(1e-13));
}

TEST_CASE("equal temperatures carry no current") {
    const SpectralData sd = diagonalize(build_krawtchouk(13, 0.4, 0.3));
    const BathConfig bath = BathConfig::from_betas(0.7, 0.7);
    const double scale = 2.0 * M_PI; // typical flow magnitude
    CHECK(std::abs(spin_flow(sd, bath)) < 1e-14 * scale);
    CHECK(std::abs(heat_flow(sd, bath)) < 1e-14 * scale * 10);
}

TEST_CASE("flows are antisymmetric under a full bath swap") {
    // swapping the baths means swapping (beta, h) pairs AND which end they
    // drive; the latter is the chain reflection, an exact row permutation
    const SpectralData sd = diagonalize(build_krawtchouk(17, 0.3, 0.4));
    SpectralData reflected = sd;
    reflected.wavefunctions = sd.wavefunctions.colwise().reverse().eval();
    for (const BathConfig& bath :
         {BathConfig::from_betas(0.11, 0.37), BathConfig{0.5, 2.0, 1.3, 0.6, 0.9}}) {
        const double q = spin_flow(sd, bath), qs = spin_flow(reflected, bath.swapped());
        const double h = heat_flow(sd, bath), hs = heat_flow(reflected, bath.swapped());
        CHECK(qs == Catch::Approx(-q).epsilon(1e-14));
        CHECK(hs == Catch::Approx(-h).epsilon(1e-14));
    }
    // for mirror-symmetric chains the reflection is trivial: swapping the
    // (beta, h) pairs alone negates the flows
    const SpectralData sym = diagonalize(build_homogeneous(14, 2.5));
    const BathConfig bath = BathConfig::from_betas(0.2, 0.9);
    CHECK(spin_flow(sym, bath.swapped()) ==
          Catch::Approx(-spin_flow(sym, bath)).epsilon(1e-12));
    CHECK(heat_flow(sym, bath.swapped()) ==
          Catch::Approx(-heat_flow(sym, bath)).epsilon(1e-12));
}

TEST_CASE("flows share the sign of the temperature difference") {
    const SpectralData sd = diagonalize(build_homogeneous(9, 2.3));
    for (double t0 : {1.0, 3.0, 12.0})
        for (double tN : {0.5, 3.0, 40.0}) {
            if (t0 == tN) continue;
            const BathConfig bath = BathConfig::from_temperatures(t0, tN);
            const double sign = t0 > tN ? 1.0 : -1.0;
            CHECK(sign * spin_flow(sd, bath) > 0.0);
            CHECK(sign * heat_flow(sd, bath) > 0.0);
        }
}

TEST_CASE("flows are monotone in the left temperature") {
    const SpectralData sd = diagonalize(build_krawtchouk(21, 0.5, 0.1));
    const double tN = 5.0;
    double prev_spin = -1e300, prev_heat = -1e300;
    for (double t0 = 0.5; t0 < 2.0e4; t0 *= 2.3) {
        const BathConfig bath = BathConfig::from_temperatures(t0, tN);
        const double q = spin_flow(sd, bath), h = heat_flow(sd, bath);
        CHECK(q >= prev_spin);
        CHECK(h >= prev_heat);
        prev_spin = q;
        prev_heat = h;
    }
}

TEST_CASE("equal-h and general-h evaluation paths agree at equal smearing") {
    const SpectralData sd = diagonalize(build_krawtchouk(15, 0.35, 0.6));
    const BathConfig bath{0.3, 0.9, 1.7, 1.7, 1.1};
    const double equal_path = 4.0 * M_PI * 1.7 * 1.7 * 1.1 * 1.1 *
                              detail::flow_sum_equal_h(sd, bath, [](double) { return 1.0; });
    const double general_path =
        2.0 * 1.1 * 1.1 * detail::flow_sum_general_h(sd, bath, [](double) { return 1.0; });
    CHECK(general_path == Catch::Approx(equal_path).epsilon(1e-12));
}

TEST_CASE("mirror flows match the frozen sinh arithmetic") {
    const SpectralData sd = diagonalize(build_homogeneous(2, 2.0));
    const auto [spin, heat] = mirror_flows(sd, BathConfig::from_betas(0.1, 0.2));
    const double e1 = std::sinh(0.05) / std::sinh(0.15);
    const double e3 = std::sinh(0.15) / std::sinh(0.45);
    CHECK(spin / (2.0 * M_PI) == Catch::Approx(0.32789).margin(1e-5));
    CHECK(spin == Catch::Approx(2.0 * M_PI * 0.5 * (e1 + e3)).epsilon(1e-13));
    CHECK(heat == Catch::Approx(M_PI * 0.5 * (e1 + 3.0 * e3)).epsilon(1e-13));
}

TEST_CASE("mirror flows vanish at equal temperatures") {
    const SpectralData sd = diagonalize(build_krawtchouk(31, 0.5, 0.2));
    const auto [spin, heat] = mirror_flows(sd, BathConfig::from_betas(1.5, 1.5));
    CHECK(spin == 0.0);
    CHECK(heat == 0.0);
}

TEST_CASE("mirror flows equal the general formulas on symmetric chains") {
    for (const ChainSpec& spec :
         {build_homogeneous(51, 2.5), build_krawtchouk(51, 0.5, 0.1)}) {
        const SpectralData sd = diagonalize(spec);
        for (const BathConfig& bath :
             {BathConfig::from_betas(0.1, 0.25), BathConfig::from_betas(2.0, 0.4, 0.8)}) {
            const auto [ms, mh] = mirror_flows(sd, bath);
            CHECK(spin_flow(sd, bath) == Catch::Approx(ms).epsilon(1e-9));
            CHECK(heat_flow(sd, bath) == Catch::Approx(mh).epsilon(1e-9));
        }
    }
}

TEST_CASE("mirror flows reject asymmetric chains and unequal smearing") {
    const SpectralData asym = diagonalize(build_krawtchouk(9, 0.3, 0.4));
    CHECK_THROWS_AS(mirror_flows(asym, BathConfig::from_betas(0.2, 0.4)), SymmetryError);
    const SpectralData sym = diagonalize(build_homogeneous(9, 2.5));
    BathConfig bath = BathConfig::from_betas(0.2, 0.4);
    bath.h_right = 2.0;
    CHECK_THROWS_AS(mirror_flows(sym, bath), InvalidParameterError);
    CHECK_THROWS_AS(conductivity(sym, bath), InvalidParameterError);
}

TEST_CASE("flows survive deep log-space regimes") {
    // beta E up to ~700 on the largest mode
    const SpectralData sd = diagonalize(build_krawtchouk(36, 0.5, 0.5));
    const BathConfig bath = BathConfig::from_betas(10.0, 19.0);
    const double q = spin_flow(sd, bath);
    const auto [ms, mh] = mirror_flows(sd, bath);
    CHECK(std::isfinite(q));
    CHECK(q > 0.0);
    CHECK(q == Catch::Approx(ms).epsilon(1e-9));
    CHECK(heat_flow(sd, bath) == Catch::Approx(mh).epsilon(1e-9));
}

TEST_CASE("bounds dominate the flows in the left-hot configuration") {
    const SpectralData sd = diagonalize(build_krawtchouk(19, 0.37, 0.3));
    const BathConfig bath = BathConfig::from_temperatures(8.0, 2.0);
    const FlowBounds b = flow_bounds(sd, bath);
    const double q = spin_flow(sd, bath), h = heat_flow(sd, bath);
    CHECK(q <= b.spin_mode_sum + 1e-12);
    CHECK(h <= b.heat_mode_sum + 1e-12);
    CHECK(b.spin_mode_sum <= b.spin_matrix_element + 1e-12);
    CHECK(b.heat_mode_sum <= b.heat_matrix_element + 1e-12);
}

TEST_CASE("bounds vanish at equal temperatures and negate under swap") {
    const SpectralData sd = diagonalize(build_homogeneous(12, 2.4));
    const FlowBounds zero = flow_bounds(sd, BathConfig::from_betas(0.5, 0.5));
    CHECK(zero.spin_mode_sum == Catch::Approx(0.0).margin(1e-300));
    CHECK(zero.heat_mode_sum == Catch::Approx(0.0).margin(1e-300));
    const BathConfig hot_right = BathConfig::from_temperatures(2.0, 9.0);
    const FlowBounds neg = flow_bounds(sd, hot_right);
    const FlowBounds pos = flow_bounds(sd, hot_right.swapped());
    CHECK(neg.spin_mode_sum == Catch::Approx(-pos.spin_mode_sum));
    // still dominates: flow is negative, bound is its mirror
    CHECK(spin_flow(sd, hot_right) >= neg.spin_mode_sum - 1e-12);
}

TEST_CASE("mirror chains saturate the per-mode bound as the gap closes") {
    const SpectralData sd = diagonalize(build_homogeneous(25, 2.5));
    double prev_gap = 1e300;
    for (double dt : {0.1, 0.01, 0.001}) {
        const BathConfig bath = BathConfig::from_temperatures(10.0 + dt, 10.0 - dt);
        const double ratio = flow_bounds(sd, bath).heat_mode_sum / heat_flow(sd, bath);
        CHECK(ratio >= 1.0 - 1e-12);
        CHECK(ratio - 1.0 < prev_gap);
        prev_gap = ratio - 1.0;
    }
    CHECK(prev_gap < 1e-6); // ratio -> 1 within O(dT)
}

TEST_CASE("bound dominance holds for seeded random chains") {
    int checked = 0;
    for (std::uint64_t trial = 0; checked < 60; ++trial) {
        const std::uint64_t seed = derive_seed(2024, trial);
        const int n = 3 + int(uniform01(seed, 1000) * 9);
        std::vector<double> j(n - 1), f(n);
        for (int i = 0; i < n - 1; ++i) j[i] = 0.5 + uniform01(seed, i);
        for (int i = 0; i < n; ++i) f[i] = uniform01(seed, 100 + i);
        const ChainSpec chain = make_chain(j, f, 2.0);
        SpectralData sd = detail::eigensolve_tridiagonal(chain);
        if (!(sd.eigenvalues[0] + chain.delta > 1e-6)) continue; // gap violated: redraw
        const double tN = 0.5 + 19.5 * uniform01(seed, 2000);
        const double t0 = tN * (1.1 + 9.0 * uniform01(seed, 2001));
        const BathConfig bath = BathConfig::from_temperatures(t0, tN);
        const FlowBounds b = flow_bounds(sd, bath);
        CHECK(spin_flow(sd, bath) <= b.spin_mode_sum + 1e-12);
        CHECK(heat_flow(sd, bath) <= b.heat_mode_sum + 1e-12);
        CHECK(b.spin_mode_sum <= b.spin_matrix_element + 1e-12);
        CHECK(b.heat_mode_sum <= b.heat_matrix_element + 1e-12);
        ++checked;
    }
}

TEST_CASE("conductivity matches the frozen two-site value") {
    const SpectralData sd = diagonalize(build_homogeneous(2, 2.0));
    const BathConfig bath = BathConfig::from_temperatures(10.0, 10.0);
    const double expected =
        (M_PI / 200.0) * 0.5 * (1.0 / std::sinh(0.1) + 9.0 / std::sinh(0.3));
    CHECK(conductivity(sd, bath) == Catch::Approx(expected).epsilon(1e-13));
}

TEST_CASE("conductivity approaches the high-temperature law") {
    const SpectralData sd = diagonalize(build_homogeneous(80, 3.0));
    const double T = 200.0;
    const BathConfig bath = BathConfig::from_temperatures(T, T);
    const double kappa = conductivity(sd, bath);
    const double law = M_PI * 79.0 / (2.0 * T) * 3.0; // (pi N / 2T)(B_0 + delta)
    CHECK(kappa / law == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("conductivity dies exponentially at low temperature") {
    const SpectralData sd = diagonalize(build_homogeneous(40, 3.0));
    const double e_min = sd.energy(0);
    const double k1 = conductivity(sd, BathConfig::from_temperatures(e_min / 25, e_min / 25));
    const double k2 = conductivity(sd, BathConfig::from_temperatures(e_min / 30, e_min / 30));
    // log kappa slope vs 1/T close to -e_min
    const double slope = std::log(k2 / k1) / (30.0 / e_min - 25.0 / e_min);
    CHECK(slope == Catch::Approx(-e_min).epsilon(0.05));
    CHECK(k2 < k1);
}

TEST_CASE("m coefficient closed forms") {
    // Krawtchouk p = 1/2: M = N/2 + delta
    for (int N : {4, 15, 40}) {
        const SpectralData sd = diagonalize(build_krawtchouk(N + 1, 0.5, 0.7));
        CHECK(m_coefficient(sd) == Catch::Approx(N / 2.0 + 0.7).epsilon(1e-10));
    }
    // homogeneous: M = B_0 + delta = delta
    const SpectralData h = diagonalize(build_homogeneous(33, 2.2));
    CHECK(m_coefficient(h) == Catch::Approx(2.2).epsilon(1e-10));
    // rescaled general p: M = (E_max + E_min)/2 (2 sqrt(p(1-p)))^N
    const int N = 20;
    const double p = 0.3;
    const ChainSpec scaled = rescale_to_band(build_krawtchouk(N + 1, p, 0.0), 1.0, 3.0);
    const SpectralData sd = diagonalize(scaled);
    const double expected = 2.0 * std::pow(2.0 * std::sqrt(p * (1.0 - p)), N);
    CHECK(m_coefficient(sd) == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("asymptotic kappa closed forms") {
    // Krawtchouk form: kappa 2^N / N independent of N by construction
    const double ref = asymptotic_kappa(ChainKind::KrawtchoukHalf, 11, 1.0, 2.0, 0.05) *
                       std::pow(2.0, 10.0) / 10.0;
    for (int n : {15, 21, 25}) {
        const double v = asymptotic_kappa(ChainKind::KrawtchoukHalf, n, 1.0, 2.0, 0.05) *
                         std::pow(2.0, double(n - 1)) / double(n - 1);
        CHECK(v == Catch::Approx(ref).epsilon(1e-12));
    }
    // both families vanish as T -> 0
    CHECK(asymptotic_kappa(ChainKind::Homogeneous, 101, 1.0, 2.0, 1e-3) < 1e-300);
    CHECK(asymptotic_kappa(ChainKind::KrawtchoukHalf, 101, 1.0, 2.0, 1e-3) == 0.0);
    CHECK_THROWS_AS(asymptotic_kappa(ChainKind::Homogeneous, 5, 2.0, 1.0, 1.0),
                    InvalidParameterError);
}

TEST_CASE("high gap limits") {
    const double delta = 0.1;
    for (double p : {0.3, 0.5, 0.7}) {
        const SpectralData sd = diagonalize(build_krawtchouk(51, p, delta));
        const auto [qlim, hlim] = high_gap_limits(sd, BathConfig::from_betas(1e-4, 0.1));
        CHECK(qlim == Catch::Approx(2.0 * M_PI).epsilon(1e-12)); // chain independent
        CHECK(hlim == Catch::Approx(M_PI * ((1.0 - p) * 50.0 + delta)).epsilon(1e-9));
    }
    // finite but huge T_0: flows within a few 1e-6 of the limits for p = 1/2
    const SpectralData sd = diagonalize(build_krawtchouk(21, 0.5, 0.5));
    const BathConfig bath = BathConfig::from_temperatures(1e8, 10.0);
    const auto [qlim, hlim] = high_gap_limits(sd, bath);
    CHECK(spin_flow(sd, bath) == Catch::Approx(qlim).epsilon(1e-5));
    CHECK(heat_flow(sd, bath) == Catch::Approx(hlim).epsilon(1e-5));
}

TEST_CASE("small-gap regime is linear in the temperature difference") {
    const SpectralData sd = diagonalize(build_krawtchouk(41, 0.5, 0.2));
    const double T = 7.0;
    double ref = 0.0;
    for (double rel : {1e-3, 1e-4, 1e-5}) {
        const double dt = rel * T;
        const BathConfig bath = BathConfig::from_temperatures(T + dt / 2, T - dt / 2);
        const double slope = mirror_flows(sd, bath).second / dt;
        if (ref == 0.0) ref = slope;
        CHECK(slope == Catch::Approx(ref).epsilon(1e-3));
    }
}

TEST_CASE("current report assembles the cross-checked record") {
    const SpectralData sd = diagonalize(build_krawtchouk(31, 0.5, 0.4));
    const BathConfig bath = BathConfig::from_temperatures(12.0, 4.0);
    const CurrentReport r = current_report(sd, bath);
    CHECK(r.mirror_symmetric);
    CHECK_FALSE(r.small_gap);
    CHECK_FALSE(r.high_gap);
    CHECK(r.kappa.has_value());
    CHECK(r.spin_flow_left > 0.0);
    CHECK(r.spin_flow_left <= r.bound_spin + 1e-12);
    CHECK(r.heat_flow_left <= r.bound_heat + 1e-12);
    CHECK(r.mirror_rel_diff < 1e-9);
    CHECK(r.m_coefficient == Catch::Approx(15.0 + 0.4).epsilon(1e-9));

    const CurrentReport asym =
        current_report(diagonalize(build_krawtchouk(9, 0.3, 0.4)), bath);
    CHECK_FALSE(asym.mirror_symmetric);
    CHECK_FALSE(asym.kappa.has_value());

    const CurrentReport hg = current_report(sd, BathConfig::from_temperatures(1000.0, 5.0));
    CHECK(hg.high_gap);
    const CurrentReport sg =
        current_report(sd, BathConfig::from_temperatures(10.0001, 10.0));
    CHECK(sg.small_gap);
}
