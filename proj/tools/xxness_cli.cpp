// xxness_cli.cpp — command line front end: spectrum | currents | sweep | oracle | pst-check

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "xxness/io.hpp"

namespace {

using namespace xxness;

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
    if (path.empty()) return nullptr;
    auto out = std::make_unique<std::ofstream>(path);
    if (!*out) throw ConfigError("cannot open output file '" + path + "'");
    return out;
}

std::ostream& pick_stream(std::unique_ptr<std::ofstream>& file) {
    return file ? static_cast<std::ostream&>(*file) : std::cout;
}

int cmd_spectrum(const RunConfig& cfg) {
    const SpectralData sd = diagonalize(chain_from_config(cfg));
    auto file = open_output(cfg.output);
    write_spectrum_csv(pick_stream(file), cfg, sd);
    return 0;
}

int cmd_currents(const RunConfig& cfg) {
    const SpectralData sd = diagonalize(chain_from_config(cfg));
    const CurrentReport report = current_report(sd, cfg.bath);
    auto file = open_output(cfg.output);
    write_current_report(pick_stream(file), cfg, report);
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("sweep command needs a 'sweep' section");
    const SweepSection& sw = *cfg.sweep;
    SweepPlan plan;
    if (cfg.chain.family == "homogeneous")
        plan.family = Family::Homogeneous;
    else if (cfg.chain.family == "krawtchouk")
        plan.family = Family::Krawtchouk;
    else
        throw ConfigError("sweep command works with the homogeneous/krawtchouk families");
    plan.p = cfg.chain.p;
    plan.delta = cfg.chain.delta;
    plan.rescale_band = cfg.chain.rescale_band;
    if (cfg.chain.perturbation) {
        plan.perturbation = cfg.chain.perturbation->kind;
        plan.xi = cfg.chain.perturbation->strength;
    }
    plan.grid = sw.grid;
    plan.n_sites = cfg.chain.n_sites;
    plan.bath = cfg.bath;
    plan.temperatures = sw.temperatures;
    plan.replicates = sw.replicates;
    plan.base_seed = sw.base_seed;
    plan.threads = cfg.threads;

    auto file = open_output(cfg.output);
    std::ostream& os = pick_stream(file);
    if (sw.kind == "m-vs-size") {
        plan.variable = SweepVariable::NSites;
        std::optional<DecayModel> model;
        if (sw.fit_model == "exp-in-N") model = DecayModel::ExpInN;
        else if (sw.fit_model == "exp-in-NlogN") model = DecayModel::ExpInNLogN;
        else if (sw.fit_model)
            throw ConfigError("unknown fit model '" + *sw.fit_model + "'");
        write_ensemble_csv(os, cfg, sweep_m_vs_size(plan, model));
    } else if (sw.kind == "currents-vs-temperature") {
        plan.variable = SweepVariable::TLeft;
        write_current_sweep_csv(os, cfg, sweep_currents_vs_temperature(plan));
    } else if (sw.kind == "kappa-regimes") {
        plan.variable = SweepVariable::NSites;
        write_kappa_csv(os, cfg, sweep_kappa_regimes(plan));
    } else {
        throw ConfigError("unknown sweep kind '" + sw.kind + "'");
    }
    return 0;
}

int cmd_oracle(const RunConfig& cfg) {
    if (cfg.oracle_max_sites > kFockMaxSites)
        throw CapacityError("oracle: max_sites " + std::to_string(cfg.oracle_max_sites) +
                            " exceeds the dense cap of " + std::to_string(kFockMaxSites));
    std::vector<OracleVerdict> verdicts;
    if (cfg.chain.family == "explicit") {
        verdicts.push_back(
            verify_chain("explicit", chain_from_config(cfg), cfg.bath, cfg.oracle_tol));
    } else {
        verdicts = run_oracle_battery(cfg.oracle_tol, cfg.bath.h_left, cfg.bath.lambda);
    }
    auto file = open_output(cfg.output);
    std::ostream& os = pick_stream(file);
    bool all_passed = true;
    for (const auto& v : verdicts) {
        os << verdict_to_json(v).dump() << "\n";
        all_passed = all_passed && v.passed;
    }
    os << (all_passed ? "# oracle: all checks passed\n" : "# oracle: FAILURES present\n");
    if (!all_passed) return 2;
    return 0;
}

int cmd_pst_check(const RunConfig& cfg) {
    const ChainSpec chain = chain_from_config(cfg);
    const SpectralData sd = diagonalize(chain);
    const double fid = transfer_fidelity(sd, cfg.pst_time);
    auto file = open_output(cfg.output);
    std::ostream& os = pick_stream(file);
    os << "time=" << format_double(cfg.pst_time) << "\n";
    os << "fidelity=" << format_double(fid) << "\n";
    os << "mirror_symmetric=" << (is_mirror_symmetric(chain) ? 1 : 0) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-equilibrium steady-state currents of open XX spin chains"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand name

    std::string config_path, output_override;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--output", output_override, "output path (default: stdout)");
    app.add_option("--seed", seed_override, "override the sweep base seed")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* sub_spectrum = app.add_subcommand("spectrum", "eigenvalues and wavefunctions (CSV)");
    auto* sub_currents = app.add_subcommand("currents", "NESS flows, bounds, and kappa");
    auto* sub_sweep = app.add_subcommand("sweep", "grid/ensemble sweeps (CSV)");
    auto* sub_oracle = app.add_subcommand("oracle", "exact Fock-space verification battery");
    auto* sub_pst = app.add_subcommand("pst-check", "state-transfer fidelity");

    CLI11_PARSE(app, argc, argv);

    try {
        xxness::RunConfig cfg = xxness::load_config(config_path);
        if (!output_override.empty()) cfg.output = output_override;
        if (seed_given && cfg.sweep) cfg.sweep->base_seed = seed_override;
        cfg.threads = threads;
        if (sub_spectrum->parsed()) return cmd_spectrum(cfg);
        if (sub_currents->parsed()) return cmd_currents(cfg);
        if (sub_sweep->parsed()) return cmd_sweep(cfg);
        if (sub_oracle->parsed()) return cmd_oracle(cfg);
        if (sub_pst->parsed()) return cmd_pst_check(cfg);
        return 1;
    } catch (const xxness::GapError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const xxness::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const xxness::DomainError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const xxness::FitError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 2;
    } catch (const xxness::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
