// Orthogonal and Ritz projectors, the spectrum of QAQ, and the spectral
// forms of the memory kernel Theta(t), the initial-data forcing g(t), and
// the fundamental solutions C(t), S(t).

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "cgmd/basis.hpp"

namespace cgmd {

struct ProjectorPair {
    Matrix P;  // orthogonal projector onto Range(Phi)
    Matrix Q;  // I - P
};

/// P = Phi (Phi^T Phi)^{-1} Phi^T via a Cholesky factorization of the mass.
inline ProjectorPair orthogonal_projector(const BasisSet& basis) {
    const Matrix& phi = basis.phi();
    Eigen::LLT<Matrix> llt(phi.transpose() * phi);
    if (llt.info() != Eigen::Success)
        throw numeric_error("orthogonal_projector: basis columns are dependent");
    Matrix p = phi * llt.solve(phi.transpose());
    Matrix q = Matrix::Identity(p.rows(), p.cols()) - p;
    return {std::move(p), std::move(q)};
}

struct RitzProjector {
    Matrix P;  // Phi (Phi^T A Phi)^{-1} Phi^T A
    Matrix Q;  // I - P
};

/// The A-weighted (energy inner product) projector onto Range(Phi).
inline RitzProjector ritz_projector(const BasisSet& basis, const Matrix& a) {
    const Matrix& phi = basis.phi();
    Matrix k = phi.transpose() * a * phi;
    Eigen::FullPivLU<Matrix> lu(k);
    if (!lu.isInvertible())
        throw numeric_error("ritz_projector: Phi^T A Phi is singular");
    Matrix p = phi * lu.solve(phi.transpose() * a);
    Matrix q = Matrix::Identity(p.rows(), p.cols()) - p;
    return {std::move(p), std::move(q)};
}

/// Eigenstructure of QAQ. Modes with eigenvalue above zero_tolerance carry
/// the memory kernel and forcing; the kernel of QAQ contains Range(Phi).
struct KernelSpectrum {
    Vector eigenvalues;   // all eigenvalues of QAQ, ascending
    Matrix eigenvectors;  // orthonormal columns matching eigenvalues
    double zero_tolerance = 0.0;
    int zero_count = 0;

    // Retained modes (eigenvalue > zero_tolerance):
    Vector mode_lambda;  // r entries
    Matrix mode_eta;     // n x r eigenvectors
    Matrix mode_b;       // m x r projected vectors b_i = Phi^T A eta_i

    int n() const { return static_cast<int>(eigenvectors.rows()); }
    int m() const { return static_cast<int>(mode_b.rows()); }
    int mode_count() const { return static_cast<int>(mode_lambda.size()); }
};

/// Full symmetric eigendecomposition of QAQ plus the projected vectors
/// needed by the kernel and forcing sums. Eigenvalues below
/// 1e-10 * max|lambda| are classified as the structural kernel.
inline KernelSpectrum qaq_spectrum(const Matrix& a, const ProjectorPair& pair, const BasisSet& basis) {
    Matrix qaq = pair.Q * a * pair.Q;
    qaq = 0.5 * (qaq + qaq.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(qaq);
    if (es.info() != Eigen::Success) throw numeric_error("qaq_spectrum: eigensolver failed");

    KernelSpectrum spec;
    spec.eigenvalues = es.eigenvalues();
    spec.eigenvectors = es.eigenvectors();
    const double scale = spec.eigenvalues.cwiseAbs().maxCoeff();
    spec.zero_tolerance = 1e-10 * scale;

    std::vector<int> keep;
    for (int i = 0; i < spec.eigenvalues.size(); ++i) {
        if (spec.eigenvalues[i] > spec.zero_tolerance)
            keep.push_back(i);
        else
            ++spec.zero_count;
    }
    const int r = static_cast<int>(keep.size());
    spec.mode_lambda.resize(r);
    spec.mode_eta.resize(spec.eigenvectors.rows(), r);
    for (int k = 0; k < r; ++k) {
        spec.mode_lambda[k] = spec.eigenvalues[keep[k]];
        spec.mode_eta.col(k) = spec.eigenvectors.col(keep[k]);
    }
    spec.mode_b = basis.phi().transpose() * (a * spec.mode_eta);
    return spec;
}

namespace detail {

inline double sinc_lambda(double lambda, double t) {
    // sin(sqrt(lambda) t) / sqrt(lambda), continued as t at lambda = 0
    const double w = std::sqrt(lambda);
    return std::abs(w * t) < 1e-8 ? t : std::sin(w * t) / w;
}

}  // namespace detail

/// Theta(t) = sum_i sin(sqrt(l_i) t)/sqrt(l_i) b_i b_i^T over retained modes.
inline Matrix memory_kernel(const KernelSpectrum& spec, double t) {
    Vector w(spec.mode_count());
    for (int i = 0; i < spec.mode_count(); ++i)
        w[i] = detail::sinc_lambda(spec.mode_lambda[i], t);
    return spec.mode_b * w.asDiagonal() * spec.mode_b.transpose();
}

/// Diagonal entry Theta_nn(t) without forming the full kernel.
inline double memory_kernel_diagonal(const KernelSpectrum& spec, int node, double t) {
    double sum = 0.0;
    for (int i = 0; i < spec.mode_count(); ++i) {
        const double b = spec.mode_b(node, i);
        sum += detail::sinc_lambda(spec.mode_lambda[i], t) * b * b;
    }
    return sum;
}

/// Projected initial-data forcing entering the memory equation,
/// Phi^T g(t) = -sum_i [cos(sqrt(l_i) t) (eta_i . u0) + sinc(l_i, t) (eta_i . v0)] b_i.
/// Vanishes identically when u0 and v0 lie in Range(Phi).
inline Vector forcing_g(const KernelSpectrum& spec, const Vector& u0_free, const Vector& v0_free,
                        double t) {
    Vector cu = spec.mode_eta.transpose() * u0_free;
    Vector cv = spec.mode_eta.transpose() * v0_free;
    Vector w(spec.mode_count());
    for (int i = 0; i < spec.mode_count(); ++i) {
        const double lam = spec.mode_lambda[i];
        w[i] = std::cos(std::sqrt(lam) * t) * cu[i] + detail::sinc_lambda(lam, t) * cv[i];
    }
    return -(spec.mode_b * w);
}

/// Fundamental solutions of Cdd = -AQ C:
///   C(t) = I + sum_i (cos(sqrt(l_i) t) - 1) xi_i eta_i^T
///   S(t) = t I + sum_i (sinc(l_i, t) - t) xi_i eta_i^T
/// with xi_i = A eta_i / l_i; the kernel of AQ carries C = I, S = t I.
/// Dense n x n assembly, gated to small models.
inline std::pair<Matrix, Matrix> fundamental_solutions(const KernelSpectrum& spec, const Matrix& a,
                                                       double t) {
    const int n = spec.n();
    if (n > 64)
        throw config_error("fundamental_solutions: dense C/S assembly is limited to n <= 64");
    Matrix xi = a * spec.mode_eta;  // columns scaled below
    for (int i = 0; i < spec.mode_count(); ++i) xi.col(i) /= spec.mode_lambda[i];
    Vector wc(spec.mode_count()), ws(spec.mode_count());
    for (int i = 0; i < spec.mode_count(); ++i) {
        const double lam = spec.mode_lambda[i];
        wc[i] = std::cos(std::sqrt(lam) * t) - 1.0;
        ws[i] = detail::sinc_lambda(lam, t) - t;
    }
    Matrix c = Matrix::Identity(n, n) + xi * wc.asDiagonal() * spec.mode_eta.transpose();
    Matrix s = t * Matrix::Identity(n, n) + xi * ws.asDiagonal() * spec.mode_eta.transpose();
    return {std::move(c), std::move(s)};
}

}  // namespace cgmd
