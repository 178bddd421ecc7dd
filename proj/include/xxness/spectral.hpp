// spectral.hpp — Single-particle diagonalization, closed-form wavefunctions,
// matrix functions, and state-transfer fidelity.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "xxness/chain.hpp"
#include "xxness/errors.hpp"

namespace xxness {

// Eigen-decomposition of the tridiagonal single-particle matrix H. Eigenvalues
// ascending; wavefunctions(n, k) = phi_n(x_k) with phi_0(x_k) > 0 per column.
struct SpectralData {
    Eigen::VectorXd eigenvalues;   // x_0 <= ... <= x_N
    Eigen::MatrixXd wavefunctions; // (site, mode)
    double delta = 0.0;

    int n_sites() const { return static_cast<int>(eigenvalues.size()); }
    int last_site() const { return n_sites() - 1; }
    double energy(int k) const { return eigenvalues[k] + delta; }
    Eigen::VectorXd energies() const {
        return eigenvalues.array() + delta;
    }
    // |phi_0(x_k)|^2 and |phi_N(x_k)|^2 rows, used by every current formula.
    Eigen::VectorXd end_weight_left() const {
        return wavefunctions.row(0).array().square();
    }
    Eigen::VectorXd end_weight_right() const {
        return wavefunctions.row(last_site()).array().square();
    }
};

namespace detail {

// Raw tridiagonal eigensolve with the first-row sign convention; no gap check.
inline SpectralData eigensolve_tridiagonal(const ChainSpec& spec) {
    spec.validate();
    const int n = spec.n_sites();
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(spec.fields.data(), n);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(spec.couplings.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigensolver failed to converge");
    SpectralData sd;
    sd.eigenvalues = solver.eigenvalues();
    sd.wavefunctions = solver.eigenvectors();
    sd.delta = spec.delta;
    for (int k = 0; k < n; ++k) {
        const double head = sd.wavefunctions(0, k);
        if (head == 0.0)
            throw NumericError("eigenvector with vanishing first entry at mode " +
                               std::to_string(k) + " (tridiagonal matrix not irreducible?)");
        if (head < 0.0) sd.wavefunctions.col(k) = -sd.wavefunctions.col(k);
    }
    return sd;
}

inline void require_positive_gap(const SpectralData& sd) {
    const double e0 = sd.eigenvalues[0] + sd.delta;
    if (!(e0 > 0.0))
        throw GapError("gap condition violated: x_0 + delta = " + std::to_string(e0), e0);
}

} // namespace detail

// Diagonalizes the chain and enforces the positive-gap condition x_0 + delta > 0.
inline SpectralData diagonalize(const ChainSpec& spec) {
    SpectralData sd = detail::eigensolve_tridiagonal(spec);
    detail::require_positive_gap(sd);
    return sd;
}

// Exact spectral data for J_n = 1, B_n = 0:
//   x_k = 2 cos((N-k+1) pi / (N+2))  (ascending in k)
//   phi_n(x_k) = sqrt(2/(N+2)) sin((n+1)(N-k+1) pi / (N+2)).
// No gap check: reference data, usable at any delta.
inline SpectralData closed_form_homogeneous(int n_sites, double delta = 0.0) {
    if (n_sites < 2)
        throw InvalidSizeError("closed_form_homogeneous: n_sites must be >= 2");
    const int N = n_sites - 1;
    const long period = 2L * (N + 2);
    const double step = M_PI / double(N + 2);
    SpectralData sd;
    sd.delta = delta;
    sd.eigenvalues.resize(n_sites);
    sd.wavefunctions.resize(n_sites, n_sites);
    const double norm = std::sqrt(2.0 / double(N + 2));
    for (int k = 0; k < n_sites; ++k) {
        const long jk = N - k + 1; // cosine argument descends as k ascends
        sd.eigenvalues[k] = 2.0 * std::cos(double(jk) * step);
        for (int n = 0; n < n_sites; ++n) {
            // reduce the sine argument modulo 2 pi in exact integer arithmetic
            const long q = (long(n + 1) * jk) % period;
            sd.wavefunctions(n, k) = norm * std::sin(double(q) * step);
        }
    }
    return sd;
}

// Exact spectral data for the Krawtchouk chain: x_k = k and wavefunctions
// phi_n(x_k) = (-1)^n sqrt(C(N,k)C(N,n) p^{k+n} (1-p)^{N-k-n}) K_n(k; p, N).
//
// Evaluated as the su(2) rotation matrix element d^j_{n-j,k-j}(theta) with
// j = N/2, cos(theta) = 1-2p, built by half-spin Clebsch-Gordan contractions.
// The naive recurrence on K_n loses all digits beyond N ~ 150; the contraction
// scheme keeps ~1e-14 absolute accuracy into the thousands.
inline SpectralData closed_form_krawtchouk(int n_sites, double p, double delta = 0.0) {
    if (n_sites < 2)
        throw InvalidSizeError("closed_form_krawtchouk: n_sites must be >= 2");
    if (!(p > 0.0 && p < 1.0))
        throw InvalidParameterError("closed_form_krawtchouk: p must lie in (0,1)");
    if (n_sites > 2001)
        throw NumericError("closed_form_krawtchouk: n_sites beyond validated range (2001)");
    const int N = n_sites - 1;
    const double theta = std::atan2(2.0 * std::sqrt(p * (1.0 - p)), 1.0 - 2.0 * p);
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    Eigen::MatrixXd d(1, 1);
    d(0, 0) = 1.0;
    for (int j2 = 1; j2 <= N; ++j2) { // j2 = 2j after this half-spin step
        Eigen::MatrixXd dd = Eigen::MatrixXd::Zero(j2 + 1, j2 + 1);
        for (int i = 0; i <= j2; ++i) {
            for (int k = 0; k <= j2; ++k) {
                double acc = 0.0;
                if (i >= 1 && k >= 1)
                    acc += std::sqrt(double(i) * double(k)) * c * d(i - 1, k - 1);
                if (i >= 1 && k <= j2 - 1)
                    acc -= std::sqrt(double(i) * double(j2 - k)) * s * d(i - 1, k);
                if (i <= j2 - 1 && k >= 1)
                    acc += std::sqrt(double(j2 - i) * double(k)) * s * d(i, k - 1);
                if (i <= j2 - 1 && k <= j2 - 1)
                    acc += std::sqrt(double(j2 - i) * double(j2 - k)) * c * d(i, k);
                dd(i, k) = acc / double(j2);
            }
        }
        d.swap(dd);
    }
    SpectralData sd;
    sd.delta = delta;
    sd.eigenvalues = Eigen::VectorXd::LinSpaced(n_sites, 0.0, double(N));
    sd.wavefunctions = std::move(d);
    return sd;
}

// U diag(f(x_k + delta)) U^T; f must be finite on the spectrum.
template <typename F>
Eigen::MatrixXd matrix_function(const SpectralData& sd, F&& f) {
    const int n = sd.n_sites();
    Eigen::VectorXd fe(n);
    for (int k = 0; k < n; ++k) {
        const double e = sd.energy(k);
        const double v = f(e);
        if (!std::isfinite(v))
            throw NumericError("matrix_function: f not finite at eigenvalue " +
                               std::to_string(e));
        fe[k] = v;
    }
    Eigen::MatrixXd m = sd.wavefunctions * fe.asDiagonal() * sd.wavefunctions.transpose();
    return 0.5 * (m + m.transpose().eval());
}

// |<0| e^{-i t H} |N>| = |sum_k phi_0(x_k) phi_N(x_k) e^{-i t x_k}|.
inline double transfer_fidelity(const SpectralData& sd, double time) {
    const int N = sd.last_site();
    std::complex<double> amp = 0.0;
    for (int k = 0; k < sd.n_sites(); ++k) {
        const double w = sd.wavefunctions(0, k) * sd.wavefunctions(N, k);
        amp += w * std::exp(std::complex<double>(0.0, -time * sd.eigenvalues[k]));
    }
    return std::abs(amp);
}

// max_k |phi_0(x_k)^2 - phi_N(x_k)^2|; zero for mirror-symmetric chains.
inline double mirror_defect(const SpectralData& sd) {
    return (sd.end_weight_left() - sd.end_weight_right()).cwiseAbs().maxCoeff();
}

inline bool has_mirror_symmetric_spectrum(const SpectralData& sd, double tol = 1e-8) {
    return mirror_defect(sd) <= tol;
}

// Smallest eigenvalue spacing; chains below ~1e-10 are flagged in reports
// (the secular approximation behind the model assumes resolvable transitions).
inline double min_eigen_gap(const SpectralData& sd) {
    double g = std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < sd.n_sites(); ++k)
        g = std::min(g, sd.eigenvalues[k + 1] - sd.eigenvalues[k]);
    return g;
}

// Affine map of the chain so the total energies x_k + delta span [e_min, e_max];
// the returned spec has delta = 0 with the window baked into the fields.
inline ChainSpec rescale_to_band(const ChainSpec& spec, double e_min, double e_max) {
    if (!(e_min > 0.0) || !(e_max > e_min))
        throw InvalidParameterError("rescale_to_band: need 0 < e_min < e_max");
    SpectralData sd = detail::eigensolve_tridiagonal(spec);
    const double lo = sd.eigenvalues[0] + spec.delta;
    const double hi = sd.eigenvalues[sd.n_sites() - 1] + spec.delta;
    if (!(hi - lo > 0.0))
        throw InvalidParameterError("rescale_to_band: degenerate spectrum span");
    const double scale = (e_max - e_min) / (hi - lo);
    const double shift = e_min - scale * lo;
    ChainSpec out = spec;
    for (double& j : out.couplings) j *= scale;
    for (double& b : out.fields) b = scale * (b + spec.delta) + shift;
    out.delta = 0.0;
    out.validate();
    return out;
}

} // namespace xxness
