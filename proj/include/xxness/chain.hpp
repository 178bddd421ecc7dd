// chain.hpp — Chain parameter sets, canonical builders, and field perturbations

#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "xxness/errors.hpp"
#include "xxness/numeric.hpp"

namespace xxness {

// Open XX chain on sites 0..N: couplings J_0..J_{N-1}, local fields B_0..B_N,
// and a constant background field delta. Immutable after construction.
struct ChainSpec {
    std::vector<double> couplings;
    std::vector<double> fields;
    double delta = 0.0;

    int n_sites() const { return static_cast<int>(fields.size()); }
    int last_site() const { return n_sites() - 1; }

    void validate() const {
        if (fields.size() < 2)
            throw InvalidSizeError("ChainSpec: need at least 2 sites, got " +
                                   std::to_string(fields.size()));
        if (couplings.size() + 1 != fields.size())
            throw InvalidSizeError("ChainSpec: couplings must have n_sites - 1 entries");
        for (std::size_t i = 0; i < couplings.size(); ++i) {
            if (couplings[i] == 0.0)
                throw InvalidParameterError("ChainSpec: coupling J_" + std::to_string(i) +
                                            " is zero (disconnected chain)");
            if (!std::isfinite(couplings[i]))
                throw InvalidParameterError("ChainSpec: non-finite coupling");
        }
        for (double b : fields)
            if (!std::isfinite(b)) throw InvalidParameterError("ChainSpec: non-finite field");
        if (!std::isfinite(delta)) throw InvalidParameterError("ChainSpec: non-finite delta");
    }
};

inline ChainSpec make_chain(std::vector<double> couplings, std::vector<double> fields,
                            double delta) {
    ChainSpec spec{std::move(couplings), std::move(fields), delta};
    spec.validate();
    return spec;
}

// J_n = 1, B_n = 0.
inline ChainSpec build_homogeneous(int n_sites, double delta) {
    if (n_sites < 2)
        throw InvalidSizeError("build_homogeneous: n_sites must be >= 2, got " +
                               std::to_string(n_sites));
    ChainSpec spec;
    spec.couplings.assign(n_sites - 1, 1.0);
    spec.fields.assign(n_sites, 0.0);
    spec.delta = delta;
    spec.validate();
    return spec;
}

// J_n = sqrt(p(1-p)) sqrt((n+1)(N-n)), B_n = p(N-n) + (1-p)n.
inline ChainSpec build_krawtchouk(int n_sites, double p, double delta) {
    if (n_sites < 2)
        throw InvalidSizeError("build_krawtchouk: n_sites must be >= 2, got " +
                               std::to_string(n_sites));
    if (!(p > 0.0 && p < 1.0))
        throw InvalidParameterError("build_krawtchouk: p must lie in (0,1), got " +
                                    std::to_string(p));
    const int N = n_sites - 1;
    ChainSpec spec;
    spec.couplings.resize(N);
    spec.fields.resize(n_sites);
    const double root_pq = std::sqrt(p * (1.0 - p));
    for (int n = 0; n < N; ++n)
        spec.couplings[n] = root_pq * std::sqrt(double(n + 1) * double(N - n));
    for (int n = 0; n <= N; ++n)
        spec.fields[n] = p * double(N - n) + (1.0 - p) * double(n);
    spec.delta = delta;
    spec.validate();
    return spec;
}

enum class PerturbationKind { LinearField, RandomField };

// Field perturbation: linear tilt xi*i/N, or xi*X_i with X_i ~ U(0,1) drawn one
// per site from a counter-based stream keyed by (seed, site).
struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::LinearField;
    double strength = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (!std::isfinite(strength))
            throw InvalidParameterError("PerturbationSpec: non-finite strength");
        if (kind == PerturbationKind::RandomField && strength < 0.0)
            throw InvalidParameterError(
                "PerturbationSpec: random-field strength must be non-negative");
    }
};

inline ChainSpec apply_perturbation(const ChainSpec& spec, const PerturbationSpec& pert) {
    spec.validate();
    pert.validate();
    ChainSpec out = spec;
    const int N = spec.last_site();
    if (pert.kind == PerturbationKind::LinearField) {
        for (int i = 0; i <= N; ++i)
            out.fields[i] += pert.strength * double(i) / double(N);
    } else {
        for (int i = 0; i <= N; ++i)
            out.fields[i] += pert.strength * uniform01(pert.seed, static_cast<std::uint64_t>(i));
    }
    return out;
}

// True iff J_n = J_{N-1-n} and B_n = B_{N-n}, within rel_tol of the parameter scale.
inline bool is_mirror_symmetric(const ChainSpec& spec, double rel_tol = 1e-12) {
    spec.validate();
    const int N = spec.last_site();
    double scale = 0.0;
    for (double j : spec.couplings) scale = std::max(scale, std::abs(j));
    for (double b : spec.fields) scale = std::max(scale, std::abs(b));
    const double tol = rel_tol * scale;
    for (int n = 0; n < N; ++n)
        if (std::abs(spec.couplings[n] - spec.couplings[N - 1 - n]) > tol) return false;
    for (int n = 0; n <= N; ++n)
        if (std::abs(spec.fields[n] - spec.fields[N - n]) > tol) return false;
    return true;
}

} // namespace xxness
