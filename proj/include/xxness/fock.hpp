// fock.hpp — Exact Fock-space verification engine: full many-body Lindbladian
// for small chains, built independently of the closed-form current module.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include "xxness/currents.hpp"
#include "xxness/spectral.hpp"

namespace xxness {

using SparseOp = Eigen::SparseMatrix<double>;

inline constexpr int kFockMaxSites = 12; // dense dimension cap 4096

// Jordan-Wigner site operators, diagonal-mode operators, the many-body
// Hamiltonian, and the fermion parity, all as sparse matrices in the
// site-occupation basis (site 0 = least significant bit).
struct FockOperatorSet {
    int n_sites = 0;
    Eigen::Index dim = 0;
    std::vector<SparseOp> site_lowering; // a_n
    std::vector<SparseOp> mode_lowering; // b_k = sum_n phi_n(x_k) a_n
    SparseOp hamiltonian;                // site-basis construction
    SparseOp number_parity;              // (-1)^{sum b_k^dag b_k}
};

namespace detail {

inline SparseOp jw_lowering(int n_sites, int site) {
    const Eigen::Index dim = Eigen::Index(1) << n_sites;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(dim / 2);
    const std::uint64_t below = (std::uint64_t(1) << site) - 1;
    for (std::uint64_t b = 0; b < std::uint64_t(dim); ++b) {
        if ((b >> site) & 1) {
            const int string = __builtin_popcountll(b & below);
            trips.emplace_back(Eigen::Index(b ^ (std::uint64_t(1) << site)), Eigen::Index(b),
                               (string & 1) ? -1.0 : 1.0);
        }
    }
    SparseOp a(dim, dim);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

} // namespace detail

inline FockOperatorSet build_fock_operators(const SpectralData& sd) {
    const int n = sd.n_sites();
    if (n > kFockMaxSites)
        throw CapacityError("build_fock_operators: " + std::to_string(n) +
                            " sites exceeds the dense cap of " + std::to_string(kFockMaxSites));
    FockOperatorSet ops;
    ops.n_sites = n;
    ops.dim = Eigen::Index(1) << n;
    ops.site_lowering.reserve(n);
    for (int s = 0; s < n; ++s) ops.site_lowering.push_back(detail::jw_lowering(n, s));
    ops.mode_lowering.reserve(n);
    for (int k = 0; k < n; ++k) {
        SparseOp b(ops.dim, ops.dim);
        for (int m = 0; m < n; ++m) b += sd.wavefunctions(m, k) * ops.site_lowering[m];
        b.prune(0.0);
        ops.mode_lowering.push_back(std::move(b));
    }
    // site-basis Hamiltonian from the tridiagonal entries of U diag(x) U^T + delta
    const Eigen::MatrixXd h1p =
        sd.wavefunctions * sd.eigenvalues.asDiagonal() * sd.wavefunctions.transpose();
    SparseOp H(ops.dim, ops.dim);
    for (int s = 0; s + 1 < n; ++s) {
        const SparseOp hop = SparseOp(ops.site_lowering[s].transpose()) * ops.site_lowering[s + 1];
        H += h1p(s, s + 1) * (hop + SparseOp(hop.transpose()));
    }
    for (int s = 0; s < n; ++s)
        H += (h1p(s, s) + sd.delta) *
             (SparseOp(ops.site_lowering[s].transpose()) * ops.site_lowering[s]);
    H.prune(0.0);
    ops.hamiltonian = std::move(H);
    std::vector<Eigen::Triplet<double>> ptrips;
    ptrips.reserve(ops.dim);
    for (Eigen::Index b = 0; b < ops.dim; ++b)
        ptrips.emplace_back(b, b, (__builtin_popcountll(std::uint64_t(b)) & 1) ? -1.0 : 1.0);
    ops.number_parity.resize(ops.dim, ops.dim);
    ops.number_parity.setFromTriplets(ptrips.begin(), ptrips.end());
    return ops;
}

// Dissipator D[rho] = l^2 sum_k [ d~_k (b_k^dag rho b_k - 1/2 {rho, b_k b_k^dag})
//                               + d_k  (b_k rho b_k^dag - 1/2 {rho, b_k^dag b_k}) ].
// Applied functionally; the explicit superoperator is only materialized for
// small dimensions.
class DissipatorMap {
public:
    DissipatorMap(const FockOperatorSet& ops, const NessCoefficients& coeffs)
        : ops_(&ops), d_(coeffs.d), d_tilde_(coeffs.d_tilde),
          lambda2_(coeffs.lambda * coeffs.lambda) {
        if (d_.size() != ops.n_sites)
            throw InvalidSizeError("DissipatorMap: coefficient/operator size mismatch");
        number_.reserve(ops.n_sites);
        hole_.reserve(ops.n_sites);
        for (int k = 0; k < ops.n_sites; ++k) {
            const SparseOp& b = ops.mode_lowering[k];
            number_.push_back((SparseOp(b.transpose()) * b).pruned());
            hole_.push_back((b * SparseOp(b.transpose())).pruned());
        }
    }

    Eigen::MatrixXd apply(const Eigen::MatrixXd& rho) const {
        Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rho.rows(), rho.cols());
        for (int k = 0; k < ops_->n_sites; ++k) {
            const SparseOp& b = ops_->mode_lowering[k];
            const SparseOp bd = b.transpose();
            out += d_tilde_[k] * (bd * rho * b - 0.5 * (rho * hole_[k] + hole_[k] * rho));
            out += d_[k] * (b * rho * bd - 0.5 * (rho * number_[k] + number_[k] * rho));
        }
        return lambda2_ * out;
    }

    // Column-stacked superoperator matrix; guarded to tiny dimensions.
    Eigen::MatrixXd matrix() const {
        const Eigen::Index dim = ops_->dim;
        if (dim > 64)
            throw CapacityError("DissipatorMap::matrix: materialization capped at dim 64");
        Eigen::MatrixXd sup(dim * dim, dim * dim);
        Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index j = 0; j < dim * dim; ++j) {
            basis(j % dim, j / dim) = 1.0;
            Eigen::MatrixXd img = apply(basis);
            sup.col(j) = Eigen::Map<Eigen::VectorXd>(img.data(), dim * dim);
            basis(j % dim, j / dim) = 0.0;
        }
        return sup;
    }

    // Scale l^2 sum_k (d_k + d~_k) used to normalize stationarity residuals.
    double rate_scale() const { return lambda2_ * (d_ + d_tilde_).sum(); }

private:
    const FockOperatorSet* ops_;
    Eigen::VectorXd d_, d_tilde_;
    double lambda2_;
    std::vector<SparseOp> number_, hole_;
};

inline DissipatorMap build_dissipator_superoperator(const FockOperatorSet& ops,
                                                    const NessCoefficients& coeffs) {
    return DissipatorMap(ops, coeffs);
}

// Steady-state density matrix: diagonal weights over mode-occupation bitstrings
// and the dense site-basis matrix Prod_k [(1-nu_k) b_k b_k^dag + nu_k b_k^dag b_k].
struct NessDensityMatrix {
    Eigen::VectorXd mode_weights; // lambda_{vec n}, indexed by mode bitstring
    Eigen::MatrixXd rho;
};

inline NessDensityMatrix ness_density_matrix(const FockOperatorSet& ops,
                                             const NessCoefficients& coeffs) {
    const int n = ops.n_sites;
    if (coeffs.occupations.size() != n)
        throw InvalidSizeError("ness_density_matrix: coefficient/operator size mismatch");
    NessDensityMatrix out;
    out.mode_weights.resize(ops.dim);
    for (Eigen::Index bits = 0; bits < ops.dim; ++bits) {
        double w = 1.0;
        for (int k = 0; k < n; ++k)
            w *= ((bits >> k) & 1) ? coeffs.occupations[k] : 1.0 - coeffs.occupations[k];
        out.mode_weights[bits] = w;
    }
    out.rho = Eigen::MatrixXd::Identity(ops.dim, ops.dim);
    for (int k = 0; k < n; ++k) {
        const SparseOp& b = ops.mode_lowering[k];
        const Eigen::MatrixXd factor =
            (1.0 - coeffs.occupations[k]) * Eigen::MatrixXd(b * SparseOp(b.transpose())) +
            coeffs.occupations[k] * Eigen::MatrixXd(SparseOp(b.transpose()) * b);
        out.rho = (out.rho * factor).eval();
    }
    return out;
}

// Stationarity of the ansatz: dissipator residual, Hamiltonian commutator, and
// the structural Lamb-shift check [sum_k c_k b_k^dag b_k, rho] = 0 for random
// diagonal c_k (the Lamb shift is diagonal in the modes, so its precise
// coefficients never reach the steady state).
struct StationarityReport {
    double dissipator_residual = 0.0;
    double hamiltonian_commutator = 0.0;
    double diagonal_commutator = 0.0;
    double rate_scale = 0.0;

    double residual() const {
        return std::max({dissipator_residual, hamiltonian_commutator, diagonal_commutator});
    }
};

inline StationarityReport verify_stationarity(const FockOperatorSet& ops,
                                              const NessCoefficients& coeffs,
                                              const NessDensityMatrix& ness,
                                              std::uint64_t probe_seed = 0x5eedULL) {
    StationarityReport rep;
    const DissipatorMap diss(ops, coeffs);
    rep.rate_scale = diss.rate_scale();
    rep.dissipator_residual = diss.apply(ness.rho).cwiseAbs().maxCoeff();
    const Eigen::MatrixXd H(ops.hamiltonian);
    rep.hamiltonian_commutator = (H * ness.rho - ness.rho * H).cwiseAbs().maxCoeff();
    Eigen::MatrixXd diag_h = Eigen::MatrixXd::Zero(ops.dim, ops.dim);
    for (int k = 0; k < ops.n_sites; ++k) {
        const double c_k = uniform01(probe_seed, k) + 0.5;
        const SparseOp& b = ops.mode_lowering[k];
        diag_h += c_k * Eigen::MatrixXd(SparseOp(b.transpose()) * b);
    }
    rep.diagonal_commutator =
        (diag_h * ness.rho - ness.rho * diag_h).cwiseAbs().maxCoeff();
    return rep;
}

// Adjoint dissipator of one bath acting on an observable:
//   D~_a[O] = l^2 sum_k phi_a(x_k)^2 [ C_{a,k}(b^dag O b - 1/2 {b^dag b, O})
//                                    + C~_{a,k}(b O b^dag - 1/2 {b b^dag, O}) ].
inline Eigen::MatrixXd adjoint_dissipator(const FockOperatorSet& ops,
                                          const NessCoefficients& coeffs, bool left,
                                          const Eigen::MatrixXd& obs) {
    const Eigen::VectorXd& weight = left ? coeffs.weight_left : coeffs.weight_right;
    const Eigen::VectorXd& c_big = left ? coeffs.c_left : coeffs.c_right;
    const Eigen::VectorXd& c_tilde = left ? coeffs.c_tilde_left : coeffs.c_tilde_right;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ops.dim, ops.dim);
    for (int k = 0; k < ops.n_sites; ++k) {
        const SparseOp& b = ops.mode_lowering[k];
        const SparseOp bd = b.transpose();
        const Eigen::MatrixXd num = Eigen::MatrixXd(SparseOp(bd) * b);
        const Eigen::MatrixXd hole = Eigen::MatrixXd(b * SparseOp(bd));
        out += weight[k] * (c_big[k] * (bd * obs * b - 0.5 * (num * obs + obs * num)) +
                            c_tilde[k] * (b * obs * bd - 0.5 * (hole * obs + obs * hole)));
    }
    return coeffs.lambda * coeffs.lambda * out;
}

// Exact per-bath currents: Q_a = sum_n Tr(D~_a[sigma^z_n] rho), h_a = Tr(D~_a[H] rho).
struct OracleCurrents {
    double spin_left = 0.0, spin_right = 0.0;
    double heat_left = 0.0, heat_right = 0.0;
};

inline OracleCurrents oracle_currents(const FockOperatorSet& ops,
                                      const NessCoefficients& coeffs,
                                      const NessDensityMatrix& ness) {
    OracleCurrents cur;
    const Eigen::MatrixXd H(ops.hamiltonian);
    Eigen::MatrixXd total_sz = -double(ops.n_sites) * Eigen::MatrixXd::Identity(ops.dim, ops.dim);
    for (int s = 0; s < ops.n_sites; ++s) {
        const SparseOp& a = ops.site_lowering[s];
        total_sz += 2.0 * Eigen::MatrixXd(SparseOp(a.transpose()) * a);
    }
    cur.spin_left = (adjoint_dissipator(ops, coeffs, true, total_sz) * ness.rho).trace();
    cur.spin_right = (adjoint_dissipator(ops, coeffs, false, total_sz) * ness.rho).trace();
    cur.heat_left = (adjoint_dissipator(ops, coeffs, true, H) * ness.rho).trace();
    cur.heat_right = (adjoint_dissipator(ops, coeffs, false, H) * ness.rho).trace();
    return cur;
}

// Gibbs state e^{-beta H}/Z of the many-body Hamiltonian (dense eigensolve).
inline Eigen::MatrixXd gibbs_state(const FockOperatorSet& ops, double beta) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(ops.hamiltonian));
    if (es.info() != Eigen::Success) throw NumericError("gibbs_state: eigensolver failed");
    // shift by the ground energy before exponentiating
    const Eigen::ArrayXd shifted = es.eigenvalues().array() - es.eigenvalues()[0];
    Eigen::VectorXd w = (-beta * shifted).exp();
    w /= w.sum();
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

inline double trace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a - b, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

// Lindblad operators S_i(omega) entering the microscopic derivation, with the
// parity string on the site-N family (the placement that reconstructs the true
// sigma^pm; see the reconstruction test).
struct LindbladOperatorSet {
    std::vector<SparseOp> s0; // S_0(-E_k) = phi_0(x_k) b_k^dag
    std::vector<SparseOp> s1; // S_1(-E_k) = phi_N(x_k) b_k^dag P
    std::vector<SparseOp> s2; // S_2(E_k)  = phi_0(x_k) b_k
    std::vector<SparseOp> s3; // S_3(E_k)  = P phi_N(x_k) b_k
};

inline LindbladOperatorSet build_lindblad_operators(const FockOperatorSet& ops,
                                                    const SpectralData& sd) {
    if (sd.n_sites() != ops.n_sites)
        throw InvalidSizeError("build_lindblad_operators: size mismatch");
    const int N = ops.n_sites - 1;
    LindbladOperatorSet lops;
    for (int k = 0; k < ops.n_sites; ++k) {
        const SparseOp bd = ops.mode_lowering[k].transpose();
        lops.s0.push_back((sd.wavefunctions(0, k) * bd).pruned());
        lops.s1.push_back((sd.wavefunctions(N, k) * (bd * ops.number_parity)).pruned());
        lops.s2.push_back((sd.wavefunctions(0, k) * ops.mode_lowering[k]).pruned());
        lops.s3.push_back(
            (sd.wavefunctions(N, k) * (ops.number_parity * ops.mode_lowering[k])).pruned());
    }
    return lops;
}

// Plain spin raising operator sigma_site^+ (bit flip, no fermionic string).
inline SparseOp spin_raising(const FockOperatorSet& ops, int site) {
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index b = 0; b < ops.dim; ++b)
        if (!((b >> site) & 1))
            trips.emplace_back(b | (Eigen::Index(1) << site), b, 1.0);
    SparseOp sp(ops.dim, ops.dim);
    sp.setFromTriplets(trips.begin(), trips.end());
    return sp;
}

// Max-norm error of sum_omega S_i(omega) against the exact spin flip operators.
inline double lindblad_reconstruction_error(const FockOperatorSet& ops,
                                            const LindbladOperatorSet& lops) {
    const int N = ops.n_sites - 1;
    auto sum_of = [&](const std::vector<SparseOp>& v) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ops.dim, ops.dim);
        for (const auto& s : v) m += Eigen::MatrixXd(s);
        return m;
    };
    const Eigen::MatrixXd sp0(spin_raising(ops, 0));
    const Eigen::MatrixXd spN(spin_raising(ops, N));
    double err = 0.0;
    err = std::max(err, (sum_of(lops.s0) - sp0).cwiseAbs().maxCoeff());
    err = std::max(err, (sum_of(lops.s1) - spN).cwiseAbs().maxCoeff());
    err = std::max(err, (sum_of(lops.s2) - sp0.transpose()).cwiseAbs().maxCoeff());
    err = std::max(err, (sum_of(lops.s3) - spN.transpose()).cwiseAbs().maxCoeff());
    return err;
}

// --- verification battery ------------------------------------------------------

struct OracleTolerances {
    double stationarity = 1e-10;     // relative to the dissipator rate scale
    double gibbs_trace_distance = 1e-10;
    double current_agreement = 1e-10; // relative, unequal temperatures
    double current_zero = 1e-12;      // absolute, equal temperatures
    double current_balance = 1e-11;   // |Q_L + Q_R|, |h_L + h_R|
};

struct OracleVerdict {
    std::string chain_label;
    int n_sites = 0;
    double beta_left = 0.0, beta_right = 0.0;
    double stationarity_residual = 0.0;
    double rate_scale = 0.0;
    double gibbs_distance = -1.0; // -1 when not applicable
    double spin_rel_error = 0.0;
    double heat_rel_error = 0.0;
    double spin_balance = 0.0;
    double heat_balance = 0.0;
    double oracle_spin_left = 0.0;
    double oracle_heat_left = 0.0;
    double closed_spin_left = 0.0;
    double closed_heat_left = 0.0;
    bool passed = false;
    std::string failure;
};

// Runs the full cross-check of one (chain, bath) point: ansatz stationarity,
// Gibbs equivalence at equal temperatures, and closed-form versus adjoint-trace
// currents.
inline OracleVerdict verify_chain(const std::string& label, const ChainSpec& chain,
                                  const BathConfig& bath,
                                  const OracleTolerances& tol = {}) {
    OracleVerdict v;
    v.chain_label = label;
    v.n_sites = chain.n_sites();
    v.beta_left = bath.beta_left;
    v.beta_right = bath.beta_right;
    const SpectralData sd = diagonalize(chain);
    const NessCoefficients co = ness_coefficients(sd, bath);
    const FockOperatorSet ops = build_fock_operators(sd);
    const NessDensityMatrix ness = ness_density_matrix(ops, co);
    const StationarityReport st = verify_stationarity(ops, co, ness);
    v.stationarity_residual = st.residual();
    v.rate_scale = st.rate_scale;
    const OracleCurrents cur = oracle_currents(ops, co, ness);
    v.oracle_spin_left = cur.spin_left;
    v.oracle_heat_left = cur.heat_left;
    v.closed_spin_left = spin_flow(sd, bath);
    v.closed_heat_left = heat_flow(sd, bath);
    v.spin_balance = std::abs(cur.spin_left + cur.spin_right);
    v.heat_balance = std::abs(cur.heat_left + cur.heat_right);
    const bool equal_temps = bath.beta_left == bath.beta_right;
    if (equal_temps) {
        v.spin_rel_error = std::max(std::abs(cur.spin_left), std::abs(v.closed_spin_left));
        v.heat_rel_error = std::max(std::abs(cur.heat_left), std::abs(v.closed_heat_left));
        if (bath.equal_smearing())
            v.gibbs_distance = trace_distance(ness.rho, gibbs_state(ops, bath.beta_left));
    } else {
        v.spin_rel_error =
            std::abs(cur.spin_left - v.closed_spin_left) / std::abs(v.closed_spin_left);
        v.heat_rel_error =
            std::abs(cur.heat_left - v.closed_heat_left) / std::abs(v.closed_heat_left);
    }
    v.passed = true;
    auto fail = [&](const std::string& why) {
        v.passed = false;
        if (!v.failure.empty()) v.failure += "; ";
        v.failure += why;
    };
    if (v.stationarity_residual > tol.stationarity * v.rate_scale)
        fail("stationarity residual " + std::to_string(v.stationarity_residual));
    if (equal_temps) {
        if (v.spin_rel_error > tol.current_zero || v.heat_rel_error > tol.current_zero)
            fail("nonzero current at equal temperatures");
        if (v.gibbs_distance > tol.gibbs_trace_distance)
            fail("Gibbs trace distance " + std::to_string(v.gibbs_distance));
    } else if (v.spin_rel_error > tol.current_agreement ||
               v.heat_rel_error > tol.current_agreement) {
        fail("oracle/closed-form current mismatch");
    }
    if (v.spin_balance > tol.current_balance || v.heat_balance > tol.current_balance)
        fail("per-bath currents do not cancel");
    return v;
}

// Default battery: {homogeneous, Krawtchouk p=0.3, p=0.5, random-perturbed
// homogeneous xi=0.4} x {N = 1, 2, 3} x {(0.1,0.2), (1,2), (0.5,0.5)}.
inline std::vector<OracleVerdict> run_oracle_battery(const OracleTolerances& tol = {},
                                                     double h = 1.0, double lambda = 1.0) {
    std::vector<OracleVerdict> out;
    const double delta = 2.0;
    const std::pair<double, double> beta_pairs[] = {{0.1, 0.2}, {1.0, 2.0}, {0.5, 0.5}};
    for (int N = 1; N <= 3; ++N) {
        const int n = N + 1;
        std::vector<std::pair<std::string, ChainSpec>> chains;
        chains.emplace_back("homogeneous", build_homogeneous(n, delta));
        chains.emplace_back("krawtchouk-p0.3", build_krawtchouk(n, 0.3, delta));
        chains.emplace_back("krawtchouk-p0.5", build_krawtchouk(n, 0.5, delta));
        chains.emplace_back("random-perturbed-homogeneous",
                            apply_perturbation(build_homogeneous(n, delta),
                                               {PerturbationKind::RandomField, 0.4, 424242}));
        for (const auto& [label, chain] : chains)
            for (const auto& [b0, bN] : beta_pairs)
                out.push_back(
                    verify_chain(label, chain, BathConfig::from_betas(b0, bN, h, lambda), tol));
    }
    return out;
}

} // namespace xxness
