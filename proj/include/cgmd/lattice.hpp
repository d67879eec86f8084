// One-dimensional atomistic chain models: pair potentials, forces,
// energies, and the linearized force-constant matrix.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "cgmd/errors.hpp"

namespace cgmd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Pair potential acting on the scalar separation r of neighboring atoms.
/// LennardJones is V(r) = r^-12 - r^-6; Harmonic is 0.5*kappa*(r - a0)^2
/// with the rest length equal to the lattice spacing a0 = 1.
struct Potential {
    enum class Kind { LennardJones, Harmonic };

    Kind kind = Kind::LennardJones;
    double kappa = 1.0;  // harmonic spring constant, ignored for LJ

    static Potential lennard_jones() { return {Kind::LennardJones, 0.0}; }
    static Potential harmonic(double kappa) { return {Kind::Harmonic, kappa}; }

    double energy(double r) const {
        if (kind == Kind::LennardJones) {
            const double r6 = 1.0 / (r * r * r * r * r * r);
            return r6 * r6 - r6;
        }
        const double d = r - 1.0;
        return 0.5 * kappa * d * d;
    }

    double derivative(double r) const {
        if (kind == Kind::LennardJones) {
            const double inv = 1.0 / r;
            const double r6 = inv * inv * inv * inv * inv * inv;
            return (-12.0 * r6 * r6 + 6.0 * r6) * inv;
        }
        return kappa * (r - 1.0);
    }

    double second_derivative(double r) const {
        if (kind == Kind::LennardJones) {
            const double inv = 1.0 / r;
            const double inv2 = inv * inv;
            const double r6 = inv2 * inv2 * inv2;
            return (156.0 * r6 * r6 - 42.0 * r6) * inv2;
        }
        return kappa;
    }
};

struct PairValue {
    double energy;
    double derivative;
};

/// Evaluates V(r) and V'(r). r must be positive.
inline PairValue pair_potential(const Potential& pot, double r) {
    if (!(r > 0.0)) throw std::domain_error("pair_potential: r must be positive");
    return {pot.energy(r), pot.derivative(r)};
}

/// A chain of atoms at unit spacing with a nearest-neighbor pair potential
/// and a set of clamped (zero-displacement) atoms. All operations are pure;
/// instances are immutable after construction.
class LatticeModel {
  public:
    LatticeModel(int n_atoms, Potential potential, std::vector<int> clamped)
        : n_(n_atoms), potential_(potential), clamped_(std::move(clamped)) {
        if (n_ < 2) throw config_error("LatticeModel: need at least 2 atoms");
        std::sort(clamped_.begin(), clamped_.end());
        is_clamped_.assign(n_, false);
        for (int c : clamped_) {
            if (c < 0 || c >= n_) throw config_error("LatticeModel: clamp index out of range");
            is_clamped_[c] = true;
        }
        for (int j = 0; j < n_; ++j)
            if (!is_clamped_[j]) free_.push_back(j);
        free_slot_.assign(n_, -1);
        for (int k = 0; k < static_cast<int>(free_.size()); ++k) free_slot_[free_[k]] = k;
    }

    static LatticeModel chain(int n_atoms, Potential potential, bool clamp_ends = true) {
        std::vector<int> clamps;
        if (clamp_ends) clamps = {0, n_atoms - 1};
        return LatticeModel(n_atoms, potential, std::move(clamps));
    }

    int n_atoms() const { return n_; }
    int n_free() const { return static_cast<int>(free_.size()); }
    const std::vector<int>& free_atoms() const { return free_; }
    const std::vector<int>& clamped_atoms() const { return clamped_; }
    bool is_clamped(int atom) const { return is_clamped_[atom]; }
    /// Slot of an atom among the free degrees of freedom, -1 if clamped.
    int free_slot(int atom) const { return free_slot_[atom]; }
    const Potential& potential() const { return potential_; }
    double reference_position(int atom) const { return static_cast<double>(atom); }
    double mass(int) const { return 1.0; }

    /// V''(a0): the stiffness of the linearized nearest-neighbor bond.
    double effective_stiffness() const { return potential_.second_derivative(1.0); }

    /// Dispersion relation of the uniform chain, omega(xi) = 2 sqrt(keff/m) sin(xi/2).
    double dispersion(double xi) const {
        return 2.0 * std::sqrt(effective_stiffness() / 1.0) * std::sin(0.5 * xi);
    }

    Vector to_full(const Vector& u_free) const {
        Vector u = Vector::Zero(n_);
        for (int k = 0; k < n_free(); ++k) u[free_[k]] = u_free[k];
        return u;
    }

    Vector to_free(const Vector& u_full) const {
        Vector u(n_free());
        for (int k = 0; k < n_free(); ++k) u[k] = u_full[free_[k]];
        return u;
    }

    /// Total pair energy relative to the reference configuration,
    /// sum over bonds of V(r) - V(a0).
    double potential_energy(const Vector& u_full) const {
        double e = 0.0;
        const double e0 = potential_.energy(1.0);
        for (int j = 0; j + 1 < n_; ++j) {
            const double r = bond_length(u_full, j);
            e += potential_.energy(r) - e0;
        }
        return e;
    }

    /// Force on every atom; clamped entries are zero. Throws
    /// simulation_blowup if any pair of neighbors has crossed.
    Vector force(const Vector& u_full) const {
        Vector f = Vector::Zero(n_);
        for (int j = 0; j + 1 < n_; ++j) {
            const double r = bond_length(u_full, j);
            const double fp = potential_.derivative(r);
            // f_j gains +V'(r_j), f_{j+1} gains -V'(r_j)
            f[j] += fp;
            f[j + 1] -= fp;
        }
        for (int c : clamped_) f[c] = 0.0;
        return f;
    }

    Vector force_free(const Vector& u_free) const { return to_free(force(to_full(u_free))); }

    /// Force-constant matrix A over the free degrees of freedom,
    /// A_kl = -d f_k / d u_l at u = 0. Assembled analytically for harmonic
    /// bonds and by central differences (step 1e-5) with symmetrization
    /// for Lennard-Jones.
    Matrix linearize() const {
        const int nf = n_free();
        Matrix a(nf, nf);
        if (potential_.kind == Potential::Kind::Harmonic) {
            a.setZero();
            const double k = potential_.kappa;
            for (int j = 0; j + 1 < n_; ++j) {
                const int lj = free_slot_[j], rj = free_slot_[j + 1];
                if (lj >= 0) a(lj, lj) += k;
                if (rj >= 0) a(rj, rj) += k;
                if (lj >= 0 && rj >= 0) {
                    a(lj, rj) -= k;
                    a(rj, lj) -= k;
                }
            }
            return a;
        }
        const double eps = 1e-5;
        for (int l = 0; l < nf; ++l) {
            Vector up = Vector::Zero(nf), um = Vector::Zero(nf);
            up[l] = eps;
            um[l] = -eps;
            a.col(l) = -(force_free(up) - force_free(um)) / (2.0 * eps);
        }
        return 0.5 * (a + a.transpose());
    }

  private:
    double bond_length(const Vector& u_full, int j) const {
        const double r = 1.0 + u_full[j + 1] - u_full[j];
        if (r <= 0.0)
            throw simulation_blowup("atom crossing at bond " + std::to_string(j));
        return r;
    }

    int n_;
    Potential potential_;
    std::vector<int> clamped_;
    std::vector<int> free_;
    std::vector<bool> is_clamped_;
    std::vector<int> free_slot_;
};

}  // namespace cgmd
