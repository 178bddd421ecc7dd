// io.hpp — Run configuration parsing and CSV/record serialization

#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xxness/currents.hpp"
#include "xxness/fock.hpp"
#include "xxness/sweeps.hpp"

namespace xxness {

using json = nlohmann::json;

// Full double round-trip: 17 significant digits.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// --- configuration -------------------------------------------------------------

struct ChainSection {
    std::string family = "homogeneous"; // homogeneous | krawtchouk | explicit
    int n_sites = 0;
    double p = 0.5;
    double delta = 0.0;
    std::vector<double> couplings; // family == explicit
    std::vector<double> fields;
    std::optional<std::pair<double, double>> rescale_band;
    std::optional<PerturbationSpec> perturbation;
};

struct SweepSection {
    std::string kind; // m-vs-size | currents-vs-temperature | kappa-regimes
    std::vector<double> grid;
    std::vector<double> temperatures;
    int replicates = 1;
    std::uint64_t base_seed = 0;
    std::optional<std::string> fit_model; // exp-in-N | exp-in-NlogN
};

struct RunConfig {
    ChainSection chain;
    BathConfig bath = BathConfig::from_betas(1.0, 1.0);
    std::optional<SweepSection> sweep;
    int oracle_max_sites = 4;
    OracleTolerances oracle_tol; // defaults from fock.hpp, overridable per run
    double pst_time = M_PI;
    bool full_wavefunctions = false;
    std::string output;
    unsigned threads = 0;
    json raw; // exact document, echoed into provenance headers
};

namespace detail {

inline double require_number(const json& j, const std::string& section,
                             const std::string& key) {
    if (!j.contains(key))
        throw ConfigError("config: missing field '" + key + "' in section '" + section + "'");
    if (!j[key].is_number())
        throw ConfigError("config: field '" + key + "' in section '" + section +
                          "' must be a number");
    return j[key].get<double>();
}

inline std::vector<double> number_array(const json& j, const std::string& section,
                                        const std::string& key) {
    if (!j[key].is_array())
        throw ConfigError("config: field '" + key + "' in section '" + section +
                          "' must be an array");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number())
            throw ConfigError("config: non-numeric entry in '" + section + "." + key + "'");
        out.push_back(v.get<double>());
    }
    return out;
}

// Exactly one of T / beta per bath side; both present is rejected as ambiguous.
inline double parse_beta(const json& bath, const std::string& side) {
    const std::string t_key = "T_" + side, b_key = "beta_" + side;
    const bool has_t = bath.contains(t_key), has_b = bath.contains(b_key);
    if (has_t && has_b)
        throw ConfigError("config: give exactly one of '" + t_key + "' and '" + b_key +
                          "' (both present is ambiguous)");
    if (!has_t && !has_b)
        throw ConfigError("config: bath section needs '" + t_key + "' or '" + b_key + "'");
    if (has_t) {
        const double t = require_number(bath, "bath", t_key);
        if (!(t > 0.0)) throw ConfigError("config: '" + t_key + "' must be positive");
        return 1.0 / t;
    }
    return require_number(bath, "bath", b_key);
}

} // namespace detail

inline RunConfig parse_config(const json& doc) {
    RunConfig cfg;
    cfg.raw = doc;
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    if (!doc.contains("chain")) throw ConfigError("config: missing 'chain' section");
    const json& c = doc["chain"];
    cfg.chain.family = c.value("family", std::string("homogeneous"));
    if (cfg.chain.family == "explicit") {
        if (!c.contains("couplings"))
            throw ConfigError("config: explicit chain is missing field 'couplings'");
        if (!c.contains("fields"))
            throw ConfigError("config: explicit chain is missing field 'fields'");
        cfg.chain.couplings = detail::number_array(c, "chain", "couplings");
        cfg.chain.fields = detail::number_array(c, "chain", "fields");
        if (cfg.chain.couplings.size() + 1 != cfg.chain.fields.size())
            throw ConfigError("config: 'couplings' must have one entry fewer than 'fields'");
        cfg.chain.n_sites = int(cfg.chain.fields.size());
    } else if (cfg.chain.family == "homogeneous" || cfg.chain.family == "krawtchouk") {
        cfg.chain.n_sites = int(detail::require_number(c, "chain", "n_sites"));
        if (cfg.chain.family == "krawtchouk")
            cfg.chain.p = detail::require_number(c, "chain", "p");
    } else {
        throw ConfigError("config: unknown chain family '" + cfg.chain.family + "'");
    }
    cfg.chain.delta = c.value("delta", 0.0);
    if (c.contains("rescale")) {
        const json& r = c["rescale"];
        cfg.chain.rescale_band = {detail::require_number(r, "chain.rescale", "e_min"),
                                  detail::require_number(r, "chain.rescale", "e_max")};
    }
    if (c.contains("perturbation")) {
        const json& p = c["perturbation"];
        PerturbationSpec pert;
        const std::string kind = p.value("kind", std::string());
        if (kind == "linear-field")
            pert.kind = PerturbationKind::LinearField;
        else if (kind == "random-field")
            pert.kind = PerturbationKind::RandomField;
        else
            throw ConfigError("config: perturbation kind must be 'linear-field' or "
                              "'random-field', got '" + kind + "'");
        pert.strength = detail::require_number(p, "chain.perturbation", "strength");
        pert.seed = p.value("seed", std::uint64_t(0));
        cfg.chain.perturbation = pert;
    }

    if (!doc.contains("bath")) throw ConfigError("config: missing 'bath' section");
    const json& b = doc["bath"];
    cfg.bath.beta_left = detail::parse_beta(b, "left");
    cfg.bath.beta_right = detail::parse_beta(b, "right");
    if (b.contains("h") && (b.contains("h_left") || b.contains("h_right")))
        throw ConfigError("config: give either 'h' or 'h_left'/'h_right', not both");
    if (b.contains("h")) {
        cfg.bath.h_left = cfg.bath.h_right = detail::require_number(b, "bath", "h");
    } else {
        cfg.bath.h_left = b.value("h_left", 1.0);
        cfg.bath.h_right = b.value("h_right", 1.0);
    }
    cfg.bath.lambda = b.value("lambda", 1.0);
    cfg.bath.validate();

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        SweepSection sw;
        sw.kind = s.value("kind", std::string());
        if (!s.contains("grid")) throw ConfigError("config: sweep section needs 'grid'");
        sw.grid = detail::number_array(s, "sweep", "grid");
        if (s.contains("temperatures"))
            sw.temperatures = detail::number_array(s, "sweep", "temperatures");
        sw.replicates = s.value("replicates", 1);
        sw.base_seed = s.value("base_seed", std::uint64_t(0));
        if (s.contains("fit_model")) sw.fit_model = s["fit_model"].get<std::string>();
        cfg.sweep = sw;
    }
    if (doc.contains("oracle")) {
        const json& o = doc["oracle"];
        cfg.oracle_max_sites = o.value("max_sites", 4);
        if (o.contains("tolerances")) {
            const json& t = o["tolerances"];
            cfg.oracle_tol.stationarity = t.value("stationarity", cfg.oracle_tol.stationarity);
            cfg.oracle_tol.gibbs_trace_distance =
                t.value("gibbs_trace_distance", cfg.oracle_tol.gibbs_trace_distance);
            cfg.oracle_tol.current_agreement =
                t.value("current_agreement", cfg.oracle_tol.current_agreement);
            cfg.oracle_tol.current_zero = t.value("current_zero", cfg.oracle_tol.current_zero);
            cfg.oracle_tol.current_balance =
                t.value("current_balance", cfg.oracle_tol.current_balance);
        }
    }
    if (doc.contains("pst")) cfg.pst_time = doc["pst"].value("time", M_PI);
    if (doc.contains("spectrum"))
        cfg.full_wavefunctions = doc["spectrum"].value("full_wavefunctions", false);
    cfg.output = doc.value("output", std::string());
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(doc);
}

// Chain spec serialization: one object with keys couplings, fields, delta.
inline json chain_to_json(const ChainSpec& spec) {
    return json{{"couplings", spec.couplings}, {"fields", spec.fields}, {"delta", spec.delta}};
}

inline ChainSpec chain_from_json(const json& j) {
    if (!j.contains("couplings") || !j.contains("fields"))
        throw ConfigError("chain document needs 'couplings' and 'fields'");
    return make_chain(j["couplings"].get<std::vector<double>>(),
                      j["fields"].get<std::vector<double>>(), j.value("delta", 0.0));
}

// Builds the concrete chain a config describes (builder + rescale + perturbation).
inline ChainSpec chain_from_config(const RunConfig& cfg) {
    ChainSpec chain;
    if (cfg.chain.family == "homogeneous")
        chain = build_homogeneous(cfg.chain.n_sites, cfg.chain.delta);
    else if (cfg.chain.family == "krawtchouk")
        chain = build_krawtchouk(cfg.chain.n_sites, cfg.chain.p, cfg.chain.delta);
    else
        chain = make_chain(cfg.chain.couplings, cfg.chain.fields, cfg.chain.delta);
    if (cfg.chain.rescale_band)
        chain = rescale_to_band(chain, cfg.chain.rescale_band->first,
                                cfg.chain.rescale_band->second);
    if (cfg.chain.perturbation) chain = apply_perturbation(chain, *cfg.chain.perturbation);
    return chain;
}

// --- CSV / record output ---------------------------------------------------------

// Provenance header: '#'-prefixed comments, one holding the exact config JSON.
inline void write_provenance(std::ostream& os, const RunConfig& cfg,
                             const std::string& what) {
    os << "# xxness " << what << "\n";
    os << "# config: " << cfg.raw.dump() << "\n";
}

// Re-parse a config echoed by write_provenance (round-trip check / reproduction).
inline RunConfig config_from_provenance(std::istream& is) {
    std::string line;
    const std::string prefix = "# config: ";
    while (std::getline(is, line))
        if (line.rfind(prefix, 0) == 0)
            return parse_config(json::parse(line.substr(prefix.size())));
    throw ConfigError("no '# config:' provenance line found");
}

inline void write_spectrum_csv(std::ostream& os, const RunConfig& cfg,
                               const SpectralData& sd) {
    write_provenance(os, cfg, "spectrum");
    os << "k,x_k,energy,phi_0,phi_N";
    if (cfg.full_wavefunctions)
        for (int n = 0; n < sd.n_sites(); ++n) os << ",phi_" << n;
    os << "\n";
    const int N = sd.last_site();
    for (int k = 0; k < sd.n_sites(); ++k) {
        os << k << ',' << format_double(sd.eigenvalues[k]) << ','
           << format_double(sd.energy(k)) << ',' << format_double(sd.wavefunctions(0, k))
           << ',' << format_double(sd.wavefunctions(N, k));
        if (cfg.full_wavefunctions)
            for (int n = 0; n < sd.n_sites(); ++n)
                os << ',' << format_double(sd.wavefunctions(n, k));
        os << "\n";
    }
}

// SpectralData export per the library interface: k, x_k, then all wavefunctions.
inline void write_spectral_csv(std::ostream& os, const SpectralData& sd) {
    os << "k,x_k";
    for (int n = 0; n < sd.n_sites(); ++n) os << ",phi_" << n;
    os << "\n";
    for (int k = 0; k < sd.n_sites(); ++k) {
        os << k << ',' << format_double(sd.eigenvalues[k]);
        for (int n = 0; n < sd.n_sites(); ++n)
            os << ',' << format_double(sd.wavefunctions(n, k));
        os << "\n";
    }
}

// Flat key=value record with full precision.
inline void write_current_report(std::ostream& os, const RunConfig& cfg,
                                 const CurrentReport& r) {
    write_provenance(os, cfg, "currents");
    os << "spin_flow_left=" << format_double(r.spin_flow_left) << "\n";
    os << "heat_flow_left=" << format_double(r.heat_flow_left) << "\n";
    os << "bound_spin=" << format_double(r.bound_spin) << "\n";
    os << "bound_heat=" << format_double(r.bound_heat) << "\n";
    os << "bound_spin_matrix=" << format_double(r.bound_spin_matrix) << "\n";
    os << "bound_heat_matrix=" << format_double(r.bound_heat_matrix) << "\n";
    os << "m_coefficient=" << format_double(r.m_coefficient) << "\n";
    os << "high_gap_spin_limit=" << format_double(r.high_gap_spin_limit) << "\n";
    os << "high_gap_heat_limit=" << format_double(r.high_gap_heat_limit) << "\n";
    if (r.kappa) os << "kappa=" << format_double(*r.kappa) << "\n";
    if (r.mirror_symmetric) {
        os << "spin_flow_matrix_form=" << format_double(r.spin_flow_matrix_form) << "\n";
        os << "heat_flow_matrix_form=" << format_double(r.heat_flow_matrix_form) << "\n";
        os << "mirror_rel_diff=" << format_double(r.mirror_rel_diff) << "\n";
    }
    os << "mirror_symmetric=" << (r.mirror_symmetric ? 1 : 0) << "\n";
    os << "small_gap=" << (r.small_gap ? 1 : 0) << "\n";
    os << "high_gap=" << (r.high_gap ? 1 : 0) << "\n";
    os << "near_degenerate_spectrum=" << (r.near_degenerate_spectrum ? 1 : 0) << "\n";
}

inline void write_ensemble_csv(std::ostream& os, const RunConfig& cfg,
                               const EnsembleResult& res) {
    write_provenance(os, cfg, "sweep m-vs-size");
    if (res.fit) {
        os << "# fit_model="
           << (res.fit->model == DecayModel::ExpInN ? "exp-in-N" : "exp-in-NlogN")
           << " rate=" << format_double(res.fit->rate)
           << " intercept=" << format_double(res.fit->intercept)
           << " r_squared=" << format_double(res.fit->r_squared) << "\n";
    }
    os << "N,mean_M,std_M,replicates\n";
    for (std::size_t i = 0; i < res.grid.size(); ++i)
        os << format_double(res.grid[i]) << ',' << format_double(res.mean[i]) << ','
           << format_double(res.std_dev[i]) << ',' << res.replicates << "\n";
}

inline void write_current_sweep_csv(std::ostream& os, const RunConfig& cfg,
                                    const CurrentSweepTable& table) {
    write_provenance(os, cfg, "sweep currents-vs-temperature");
    os << "# spin_limit=" << format_double(table.spin_limit)
       << " heat_limit=" << format_double(table.heat_limit)
       << " monotone_spin=" << (table.monotone_spin ? 1 : 0)
       << " monotone_heat=" << (table.monotone_heat ? 1 : 0) << "\n";
    os << "T_left,spin_flow,heat_flow\n";
    for (const auto& row : table.rows)
        os << format_double(row.t_left) << ',' << format_double(row.spin) << ','
           << format_double(row.heat) << "\n";
}

inline void write_kappa_csv(std::ostream& os, const RunConfig& cfg,
                            const std::vector<KappaRow>& rows) {
    write_provenance(os, cfg, "sweep kappa-regimes");
    os << "N,T,kappa,kappa_per_site,kappa_asymptotic\n";
    for (const auto& row : rows)
        os << row.n << ',' << format_double(row.temperature) << ','
           << format_double(row.kappa) << ',' << format_double(row.kappa_per_site) << ','
           << format_double(row.kappa_asymptotic) << "\n";
}

inline json verdict_to_json(const OracleVerdict& v) {
    json j{{"chain", v.chain_label},
           {"n_sites", v.n_sites},
           {"beta_left", v.beta_left},
           {"beta_right", v.beta_right},
           {"stationarity_residual", v.stationarity_residual},
           {"rate_scale", v.rate_scale},
           {"spin_rel_error", v.spin_rel_error},
           {"heat_rel_error", v.heat_rel_error},
           {"spin_balance", v.spin_balance},
           {"heat_balance", v.heat_balance},
           {"oracle_spin_left", v.oracle_spin_left},
           {"oracle_heat_left", v.oracle_heat_left},
           {"closed_spin_left", v.closed_spin_left},
           {"closed_heat_left", v.closed_heat_left},
           {"passed", v.passed}};
    if (v.gibbs_distance >= 0.0) j["gibbs_trace_distance"] = v.gibbs_distance;
    if (!v.failure.empty()) j["failure"] = v.failure;
    return j;
}

} // namespace xxness
