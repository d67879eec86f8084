// Reduced second-order systems: conventional Galerkin projection, the
// truncated direct moment expansion (with stability audit), Krylov-subspace
// interface enrichment, and the rational Laplace approximants of the
// memory kernel.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "cgmd/projection.hpp"

namespace cgmd {

enum class ReductionKind { Conventional, DirectExpansion, Extended };

/// Whether a reduced system samples the atomistic force field at the
/// reconstructed displacement or uses the linearized stiffness.
enum class ForceModel { Atomistic, Linearized };

/// A second-order system  mass * xdd = force(x)  in reduced coordinates,
/// with the map back to atomic displacements. force is pure and safe to
/// call concurrently.
struct ReducedSystem {
    ReductionKind kind = ReductionKind::Conventional;
    Matrix mass;
    Matrix reconstruction;  // n_free x (coarse_dim + enrich_dim)
    std::optional<Matrix> stiffness;  // set for Linearized systems
    std::function<Vector(const Vector&)> force;
    int coarse_dim = 0;
    int enrich_dim = 0;

    int dim() const { return coarse_dim + enrich_dim; }
};

namespace detail {

inline std::function<Vector(const Vector&)> make_force(const Matrix& reconstruction,
                                                       const LatticeModel& model,
                                                       const std::optional<Matrix>& stiffness) {
    if (stiffness) {
        Matrix k = *stiffness;
        return [k](const Vector& x) -> Vector { return -(k * x); };
    }
    Matrix r = reconstruction;
    LatticeModel m = model;
    return [r, m](const Vector& x) -> Vector { return r.transpose() * m.force_free(r * x); };
}

}  // namespace detail

/// M qdd = Phi^T f(Phi q); the linear variant stores K = Phi^T A Phi.
inline ReducedSystem conventional_galerkin(const BasisSet& basis, const LatticeModel& model,
                                           ForceModel fm = ForceModel::Atomistic) {
    ReducedSystem sys;
    sys.kind = ReductionKind::Conventional;
    sys.mass = mass_matrix(basis);
    sys.reconstruction = basis.phi();
    sys.coarse_dim = basis.size();
    if (fm == ForceModel::Linearized) {
        const Matrix a = model.linearize();
        sys.stiffness = basis.phi().transpose() * a * basis.phi();
    }
    sys.force = detail::make_force(sys.reconstruction, model, sys.stiffness);
    return sys;
}

/// Orthonormal enrichment vectors spanning Krylov directions of selected
/// nodes, orthogonal to Range(Phi).
struct EnrichedBasis {
    Matrix psi;                       // n_free x k, Psi^T Psi = I, Psi^T Phi = 0
    std::vector<int> selected_nodes;  // basis column indices J
    int depth = 0;                    // L
    std::vector<int> halo;            // atoms touched by the generated vectors

    int size() const { return static_cast<int>(psi.cols()); }
};

/// Builds span{A phi_j, ..., A^L phi_j : j in J} by repeated force-difference
/// application of A, orthogonalizes first against Phi and then internally by
/// modified Gram-Schmidt with one reorthogonalization pass, and drops
/// candidates whose residual falls below 1e-10 of their incoming norm.
inline EnrichedBasis krylov_enrich(const BasisSet& basis, const LatticeModel& model,
                                   const std::vector<int>& selected, int depth) {
    if (depth < 1) throw config_error("krylov_enrich: depth must be >= 1");
    for (int j : selected)
        if (j < 0 || j >= basis.size()) throw config_error("krylov_enrich: node index out of range");

    const int nf = model.n_free();
    const Matrix& phi = basis.phi();
    Eigen::LLT<Matrix> mass_llt(phi.transpose() * phi);
    if (mass_llt.info() != Eigen::Success) throw numeric_error("krylov_enrich: dependent basis");

    const double eps = 1e-5;
    auto apply_a = [&](const Vector& v) -> Vector {
        // A v  ~  -[f(eps v) - f(-eps v)] / (2 eps) on a unit-norm v
        return -(model.force_free(eps * v) - model.force_free(-eps * v)) / (2.0 * eps);
    };
    auto project_out_phi = [&](const Vector& v) -> Vector {
        return v - phi * mass_llt.solve(phi.transpose() * v);
    };

    std::vector<Vector> accepted;
    std::vector<bool> in_halo(model.n_atoms(), false);
    for (int j : selected) {
        Vector w = phi.col(j);
        for (int l = 1; l <= depth; ++l) {
            w = apply_a(w / w.norm());  // per-level normalization keeps the span
            const double max_abs = w.cwiseAbs().maxCoeff();
            for (int atom : model.free_atoms()) {
                const int slot = model.free_slot(atom);
                if (std::abs(w[slot]) > 1e-14 * max_abs) in_halo[atom] = true;
            }
            const double pre_norm = w.norm();
            Vector v = project_out_phi(w);
            for (const Vector& p : accepted) v -= p.dot(v) * p;
            // one reorthogonalization pass
            v = project_out_phi(v);
            for (const Vector& p : accepted) v -= p.dot(v) * p;
            if (v.norm() >= 1e-10 * pre_norm) accepted.push_back(v / v.norm());
        }
    }
    if (accepted.empty())
        throw enrichment_empty("krylov_enrich: all candidates were dependent on the basis");

    EnrichedBasis out;
    out.psi.resize(nf, static_cast<int>(accepted.size()));
    for (int c = 0; c < out.psi.cols(); ++c) out.psi.col(c) = accepted[c];
    out.selected_nodes = selected;
    out.depth = depth;
    for (int atom = 0; atom < model.n_atoms(); ++atom)
        if (in_halo[atom]) out.halo.push_back(atom);
    return out;
}

/// Galerkin projection onto Range([Phi | Psi]): block-diagonal mass
/// (Phi^T Phi, I) and force [Phi | Psi]^T f(Phi q + Psi xi).
inline ReducedSystem extended_galerkin(const BasisSet& basis, const EnrichedBasis& enriched,
                                       const LatticeModel& model,
                                       ForceModel fm = ForceModel::Atomistic) {
    const int m = basis.size();
    const int k = enriched.size();
    ReducedSystem sys;
    sys.kind = ReductionKind::Extended;
    sys.coarse_dim = m;
    sys.enrich_dim = k;
    sys.reconstruction.resize(basis.n_free(), m + k);
    sys.reconstruction.leftCols(m) = basis.phi();
    if (k > 0) sys.reconstruction.rightCols(k) = enriched.psi;
    sys.mass = Matrix::Identity(m + k, m + k);
    sys.mass.topLeftCorner(m, m) = mass_matrix(basis);
    if (fm == ForceModel::Linearized) {
        const Matrix a = model.linearize();
        sys.stiffness = sys.reconstruction.transpose() * a * sys.reconstruction;
    }
    sys.force = detail::make_force(sys.reconstruction, model, sys.stiffness);
    return sys;
}

/// Generalized mass/stiffness pair of the truncated direct expansion.
/// closed is set when the coupling K2 - K1 K0^{-1} K1 vanishes (complete or
/// A-invariant basis); the hierarchy then terminates at the conventional
/// equations and the pencil is just (K0, K1).
struct Pencil {
    Matrix M;
    Matrix K;
    int depth = 0;
    bool closed = false;
};

/// Truncated moment hierarchy of depth 1 (variables q, xi0) or
/// 2 (q, xi0, xi1), in the block layout
///   M = diag(K0, I[, I])
///   K = [K1, I, 0; K2 - K1 K0^{-1} K1, -K1 K0^{-1}, I; ...].
inline Pencil direct_expansion(const StiffnessFamily& family, int depth) {
    if (depth != 1 && depth != 2) throw config_error("direct_expansion: depth must be 1 or 2");
    if (static_cast<int>(family.size()) < depth + 2)
        throw config_error("direct_expansion: stiffness family too short for requested depth");
    const Matrix& k0 = family[0];
    const Matrix& k1 = family[1];
    const Matrix& k2 = family[2];
    const int m = static_cast<int>(k0.rows());
    Eigen::LLT<Matrix> llt(k0);
    if (llt.info() != Eigen::Success) throw numeric_error("direct_expansion: K0 is singular");
    const Matrix k1_k0inv = llt.solve(k1.transpose()).transpose();  // K1 K0^{-1}
    const Matrix coupling = k2 - k1_k0inv * k1;                     // K2 - K1 K0^{-1} K1

    Pencil p;
    p.depth = depth;
    const double scale = k1.cwiseAbs().maxCoeff() + k2.cwiseAbs().maxCoeff();
    if (coupling.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
        // Nothing to expand: the auxiliary variables are structurally zero.
        p.M = k0;
        p.K = k1;
        p.closed = true;
        return p;
    }

    if (depth == 1) {
        p.M = Matrix::Identity(2 * m, 2 * m);
        p.M.topLeftCorner(m, m) = k0;
        p.K = Matrix::Zero(2 * m, 2 * m);
        p.K.topLeftCorner(m, m) = k1;
        p.K.block(0, m, m, m) = Matrix::Identity(m, m);
        p.K.block(m, 0, m, m) = coupling;
        p.K.block(m, m, m, m) = -k1_k0inv;
        return p;
    }

    const Matrix& k3 = family[3];
    const Matrix k2_k0inv = llt.solve(k2.transpose()).transpose();  // K2 K0^{-1}
    p.M = Matrix::Identity(3 * m, 3 * m);
    p.M.topLeftCorner(m, m) = k0;
    p.K = Matrix::Zero(3 * m, 3 * m);
    p.K.topLeftCorner(m, m) = k1;
    p.K.block(0, m, m, m) = Matrix::Identity(m, m);
    p.K.block(m, 0, m, m) = coupling;
    p.K.block(m, m, m, m) = -k1_k0inv;
    p.K.block(m, 2 * m, m, m) = Matrix::Identity(m, m);
    p.K.block(2 * m, 0, m, m) = k3 - k2_k0inv * k1;
    p.K.block(2 * m, m, m, m) = -k2_k0inv;
    p.K.block(2 * m, 2 * m, m, m) = k1_k0inv;
    return p;
}

struct StabilityAudit {
    Eigen::VectorXcd eigenvalues;
    bool stable = false;
};

/// Generalized eigenvalues of (K, M). The second-order system is linearly
/// stable only when all of them are real and nonnegative.
inline StabilityAudit stability_audit(const Pencil& pencil) {
    Eigen::FullPivLU<Matrix> lu(pencil.M);
    if (!lu.isInvertible()) throw numeric_error("stability_audit: singular mass block");
    Eigen::EigenSolver<Matrix> es(lu.solve(pencil.K));
    if (es.info() != Eigen::Success) throw numeric_error("stability_audit: eigensolver failed");

    StabilityAudit audit;
    audit.eigenvalues = es.eigenvalues();
    double scale = 0.0;
    for (int i = 0; i < audit.eigenvalues.size(); ++i)
        scale = std::max(scale, std::abs(audit.eigenvalues[i]));
    if (scale == 0.0) scale = 1.0;
    audit.stable = true;
    for (int i = 0; i < audit.eigenvalues.size(); ++i) {
        const auto z = audit.eigenvalues[i];
        if (std::abs(z.imag()) >= 1e-8 * scale || z.real() < -1e-8 * scale) audit.stable = false;
    }
    return audit;
}

/// The projected stiffness blocks of the analytic two-level extension:
///   K2t = Phi^T A Q A Phi          K3t = Phi^T A Q A Q A Phi
///   K4t, K5t: the same pattern one level deeper, through Q1.
/// Requires Q A Phi of full column rank (pure coarse bases); hybrid bases
/// make K2t structurally singular because A maps interior identity columns
/// back into the basis range.
struct TildeStiffness {
    Matrix K2, K3, K4, K5;
};

inline TildeStiffness tilde_stiffness(const BasisSet& basis, const Matrix& a) {
    const ProjectorPair pq = orthogonal_projector(basis);
    const Matrix w1 = pq.Q * (a * basis.phi());
    TildeStiffness ts;
    ts.K2 = w1.transpose() * w1;
    ts.K3 = w1.transpose() * (a * w1);
    Eigen::LLT<Matrix> llt(ts.K2);
    if (llt.info() != Eigen::Success)
        throw numeric_error("tilde_stiffness: Q A Phi is rank deficient");
    const Matrix aw1 = a * w1;
    const Matrix w2 = pq.Q * aw1 - w1 * llt.solve(w1.transpose() * aw1);  // (Q - P1) A w1
    ts.K4 = w2.transpose() * w2;
    ts.K5 = w2.transpose() * (a * w2);
    return ts;
}

using ComplexMatrix = Eigen::MatrixXcd;

namespace detail {

inline ComplexMatrix invert_block(const ComplexMatrix& b, const char* who) {
    Eigen::FullPivLU<ComplexMatrix> lu(b);
    if (!lu.isInvertible()) throw numeric_error(std::string(who) + ": pole at requested s");
    return lu.inverse();
}

}  // namespace detail

/// Theta1(s) = K2t (s^2 K2t + K3t)^{-1} K2t, the one-level rational
/// approximant of the memory kernel's Laplace transform.
inline ComplexMatrix rational_kernel_1(const TildeStiffness& ts, std::complex<double> s) {
    const ComplexMatrix k2 = ts.K2.cast<std::complex<double>>();
    const ComplexMatrix block = s * s * k2 + ts.K3.cast<std::complex<double>>();
    return k2 * detail::invert_block(block, "rational_kernel_1") * k2;
}

/// Theta2(s) = K2t [(s^2 K2t + K3t) - K4t (s^2 K4t + K5t)^{-1} K4t]^{-1} K2t,
/// the two-level approximant obtained by eliminating xi1.
inline ComplexMatrix rational_kernel_2(const TildeStiffness& ts, std::complex<double> s) {
    const ComplexMatrix k2 = ts.K2.cast<std::complex<double>>();
    const ComplexMatrix k4 = ts.K4.cast<std::complex<double>>();
    const ComplexMatrix inner = s * s * k4 + ts.K5.cast<std::complex<double>>();
    const ComplexMatrix block = s * s * k2 + ts.K3.cast<std::complex<double>>() -
                                k4 * detail::invert_block(inner, "rational_kernel_2") * k4;
    return k2 * detail::invert_block(block, "rational_kernel_2") * k2;
}

}  // namespace cgmd
