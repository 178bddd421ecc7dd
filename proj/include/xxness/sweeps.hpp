// sweeps.hpp — Parameter sweeps, disorder ensembles, and decay fits

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xxness/currents.hpp"
#include "xxness/spectral.hpp"

namespace xxness {

enum class Family { Homogeneous, Krawtchouk };
enum class SweepVariable { NSites, TLeft };
enum class DecayModel { ExpInN, ExpInNLogN };

// One sweep: a chain family (optionally spectrum-rescaled and field-perturbed),
// a swept variable with its grid, bath parameters, and ensemble settings.
// Replicate r at grid point g draws its random fields from
// derive_seed(base_seed, r, g), so points rerun independently.
struct SweepPlan {
    Family family = Family::Homogeneous;
    double p = 0.5;   // Krawtchouk parameter
    double delta = 0.0;
    std::optional<std::pair<double, double>> rescale_band; // applied before perturbation
    std::optional<PerturbationKind> perturbation;
    double xi = 0.0;
    SweepVariable variable = SweepVariable::NSites;
    std::vector<double> grid;
    int n_sites = 0; // fixed size for non-size sweeps
    BathConfig bath = BathConfig::from_betas(1.0, 1.0);
    std::vector<double> temperatures; // kappa sweeps: mean temperatures per row
    int replicates = 1;
    std::uint64_t base_seed = 0;
    unsigned threads = 0;

    void validate() const {
        bath.validate();
        if (grid.size() < 1) throw PlanError("SweepPlan: empty grid");
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            if (!(grid[i] < grid[i + 1]))
                throw PlanError("SweepPlan: grid must be strictly increasing");
        if (replicates < 1) throw PlanError("SweepPlan: replicates must be >= 1");
        if (replicates > 1 && perturbation != PerturbationKind::RandomField)
            throw PlanError("SweepPlan: replicates > 1 only makes sense for random fields");
        if (replicates > 1 && replicates < 30)
            throw PlanError("SweepPlan: standard deviations need >= 30 replicates");
        if (variable != SweepVariable::NSites && n_sites < 2)
            throw PlanError("SweepPlan: fixed n_sites must be >= 2");
        if (family == Family::Krawtchouk && !(p > 0.0 && p < 1.0))
            throw PlanError("SweepPlan: Krawtchouk p must lie in (0,1)");
    }
};

namespace detail {

inline ChainSpec plan_chain(const SweepPlan& plan, int n_sites, std::size_t grid_index,
                            int replicate) {
    ChainSpec chain = plan.family == Family::Homogeneous
                          ? build_homogeneous(n_sites, plan.delta)
                          : build_krawtchouk(n_sites, plan.p, plan.delta);
    if (plan.rescale_band)
        chain = rescale_to_band(chain, plan.rescale_band->first, plan.rescale_band->second);
    if (plan.perturbation) {
        PerturbationSpec pert;
        pert.kind = *plan.perturbation;
        pert.strength = plan.xi;
        pert.seed = derive_seed(plan.base_seed, std::uint64_t(replicate),
                                std::uint64_t(grid_index));
        chain = apply_perturbation(chain, pert);
    }
    return chain;
}

inline int grid_size_at(const SweepPlan& plan, std::size_t i) {
    const double v = plan.grid[i];
    const int n = int(std::lround(v)) + 1; // grid stores N, chains have N+1 sites
    if (std::abs(v - std::lround(v)) > 1e-9 || n < 2)
        throw PlanError("SweepPlan: size grid entries must be integers >= 1");
    return n;
}

} // namespace detail

struct FitResult {
    DecayModel model = DecayModel::ExpInN;
    double rate = 0.0;      // decay rate (minus the fitted slope)
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least-squares fit of log M against N (ExpInN) or N log N (ExpInNLogN).
inline FitResult fit_decay(const std::vector<double>& sizes,
                           const std::vector<double>& log_means, DecayModel model) {
    if (sizes.size() != log_means.size() || sizes.size() < 4)
        throw FitError("fit_decay: need at least 4 matching grid points");
    const std::size_t n = sizes.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(log_means[i])) throw FitError("fit_decay: non-finite log mean");
        xs[i] = model == DecayModel::ExpInN ? sizes[i] : sizes[i] * std::log(sizes[i]);
        sx += xs[i];
        sy += log_means[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * log_means[i];
    }
    const double denom = double(n) * sxx - sx * sx;
    if (!(std::abs(denom) > 0.0)) throw FitError("fit_decay: degenerate abscissa grid");
    const double slope = (double(n) * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / double(n);
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / double(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = slope * xs[i] + intercept;
        ss_res += (log_means[i] - fit) * (log_means[i] - fit);
        ss_tot += (log_means[i] - mean_y) * (log_means[i] - mean_y);
    }
    FitResult out;
    out.model = model;
    out.rate = -slope;
    out.intercept = intercept;
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

struct EnsembleResult {
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> std_dev;
    int replicates = 1;
    std::optional<FitResult> fit;
};

// M(H+Delta) per chain size, with ensemble statistics over random-field
// replicates. Deterministic for a fixed plan (seeds included).
inline EnsembleResult sweep_m_vs_size(const SweepPlan& plan,
                                      std::optional<DecayModel> fit_model = {}) {
    plan.validate();
    if (plan.variable != SweepVariable::NSites)
        throw PlanError("sweep_m_vs_size: variable must be the chain size");
    EnsembleResult out;
    out.grid = plan.grid;
    out.mean.resize(plan.grid.size());
    out.std_dev.assign(plan.grid.size(), 0.0);
    out.replicates = plan.replicates;
    parallel_for(plan.grid.size(), plan.threads, [&](std::size_t g) {
        const int n_sites = detail::grid_size_at(plan, g);
        double sum = 0.0, sumsq = 0.0;
        for (int r = 0; r < plan.replicates; ++r) {
            const ChainSpec chain = detail::plan_chain(plan, n_sites, g, r);
            const double m = m_coefficient(detail::eigensolve_tridiagonal(chain));
            sum += m;
            sumsq += m * m;
        }
        const double mean = sum / plan.replicates;
        out.mean[g] = mean;
        if (plan.replicates > 1)
            out.std_dev[g] =
                std::sqrt(std::max(0.0, (sumsq - plan.replicates * mean * mean) /
                                            (plan.replicates - 1)));
    });
    if (fit_model) {
        std::vector<double> log_means(out.mean.size());
        for (std::size_t i = 0; i < out.mean.size(); ++i) log_means[i] = std::log(out.mean[i]);
        out.fit = fit_decay(out.grid, log_means, *fit_model);
    }
    return out;
}

struct CurrentSweepRow {
    double t_left = 0.0;
    double spin = 0.0;
    double heat = 0.0;
};

struct CurrentSweepTable {
    std::vector<CurrentSweepRow> rows;
    double spin_limit = 0.0; // beta_0 -> 0 saturation values
    double heat_limit = 0.0;
    bool monotone_spin = true;
    bool monotone_heat = true;
};

// Q_L and h_L against the left-bath temperature, with the high-gap limit lines.
inline CurrentSweepTable sweep_currents_vs_temperature(const SweepPlan& plan) {
    plan.validate();
    if (plan.variable != SweepVariable::TLeft)
        throw PlanError("sweep_currents_vs_temperature: variable must be T_left");
    for (double t : plan.grid)
        if (!(t > 0.0)) throw PlanError("sweep_currents_vs_temperature: temperatures > 0");
    const ChainSpec chain = detail::plan_chain(plan, plan.n_sites, 0, 0);
    const SpectralData sd = diagonalize(chain);
    CurrentSweepTable out;
    out.rows.resize(plan.grid.size());
    parallel_for(plan.grid.size(), plan.threads, [&](std::size_t i) {
        BathConfig bath = plan.bath;
        bath.beta_left = 1.0 / plan.grid[i];
        out.rows[i] = CurrentSweepRow{plan.grid[i], spin_flow(sd, bath), heat_flow(sd, bath)};
    });
    const auto limits = high_gap_limits(sd, plan.bath);
    out.spin_limit = limits.first;
    out.heat_limit = limits.second;
    for (std::size_t i = 0; i + 1 < out.rows.size(); ++i) {
        if (out.rows[i + 1].spin < out.rows[i].spin) out.monotone_spin = false;
        if (out.rows[i + 1].heat < out.rows[i].heat) out.monotone_heat = false;
    }
    return out;
}

struct KappaRow {
    int n = 0; // chain last index N
    double temperature = 0.0;
    double kappa = 0.0;
    double kappa_per_site = 0.0;
    double kappa_asymptotic = 0.0; // NaN when no closed form applies
};

// kappa and kappa/N on a (size x temperature) grid, with the low-temperature
// closed-form column alongside.
inline std::vector<KappaRow> sweep_kappa_regimes(const SweepPlan& plan) {
    plan.validate();
    if (plan.variable != SweepVariable::NSites)
        throw PlanError("sweep_kappa_regimes: variable must be the chain size");
    if (plan.temperatures.empty())
        throw PlanError("sweep_kappa_regimes: needs at least one temperature");
    if (plan.perturbation)
        throw PlanError("sweep_kappa_regimes: perturbations break mirror symmetry");
    const bool kraw_half = plan.family == Family::Krawtchouk && plan.p == 0.5;
    if (plan.family == Family::Krawtchouk && !kraw_half)
        throw SymmetryError("sweep_kappa_regimes: Krawtchouk chains need p = 1/2");
    std::vector<KappaRow> rows(plan.grid.size() * plan.temperatures.size());
    parallel_for(plan.grid.size(), plan.threads, [&](std::size_t g) {
        const int n_sites = detail::grid_size_at(plan, g);
        const ChainSpec chain = detail::plan_chain(plan, n_sites, g, 0);
        const SpectralData sd = diagonalize(chain);
        const double e_min = sd.energy(0);
        const double e_max = sd.energy(sd.last_site());
        for (std::size_t t = 0; t < plan.temperatures.size(); ++t) {
            const double T = plan.temperatures[t];
            BathConfig bath = plan.bath;
            bath.beta_left = bath.beta_right = 1.0 / T;
            KappaRow row;
            row.n = n_sites - 1;
            row.temperature = T;
            row.kappa = conductivity(sd, bath);
            row.kappa_per_site = row.kappa / double(n_sites - 1);
            row.kappa_asymptotic = asymptotic_kappa(
                kraw_half ? ChainKind::KrawtchoukHalf : ChainKind::Homogeneous, n_sites,
                e_min, e_max, T, bath.h_left, bath.lambda);
            rows[g * plan.temperatures.size() + t] = row;
        }
    });
    return rows;
}

} // namespace xxness
