// Pairwise force decomposition, local virial stress, stress-based force
// sampling, and the integral approximation of the mass matrix — the 1D
// chain analogs of the triangle summation rules.

#pragma once

#include <Eigen/Dense>

#include "cgmd/basis.hpp"

namespace cgmd {

/// Bond forces of the nearest-neighbor chain: bond_force[j] is the force on
/// atom j exerted by atom j+1; antisymmetry f_ij = -f_ji holds by
/// construction.
struct PairForces {
    Eigen::VectorXd bond_force;  // n_atoms - 1 entries

    double operator()(int i, int j) const {
        if (j == i + 1) return bond_force[i];
        if (j == i - 1) return -bond_force[j];
        return 0.0;
    }
};

inline PairForces pair_forces(const LatticeModel& model, const Vector& u_full) {
    PairForces pf;
    pf.bond_force.resize(model.n_atoms() - 1);
    for (int j = 0; j + 1 < model.n_atoms(); ++j) {
        const double r = 1.0 + u_full[j + 1] - u_full[j];
        pf.bond_force[j] = model.potential().derivative(r);
    }
    return pf;
}

/// Scalar virial stress per atom, sigma_i = -(1/2 V0) sum_j f_ij (y_i - y_j),
/// with reference bond vectors and unit cell volume V0 = a0 = 1.
struct LocalStressField {
    Vector sigma;       // one entry per atom
    double cell_volume = 1.0;
};

inline LocalStressField virial_stress(const LatticeModel& model, const Vector& u_full) {
    const PairForces pf = pair_forces(model, u_full);
    LocalStressField field;
    field.sigma = Vector::Zero(model.n_atoms());
    for (int i = 0; i < model.n_atoms(); ++i) {
        double s = 0.0;
        if (i + 1 < model.n_atoms()) s += pf(i, i + 1) * (-1.0);  // y_i - y_{i+1} = -a0
        if (i - 1 >= 0) s += pf(i, i - 1) * (+1.0);
        field.sigma[i] = -s / (2.0 * field.cell_volume);
    }
    return field;
}

namespace detail {

// Piecewise slope of a hat column; the node atom carries the average of the
// two one-sided slopes (zero for uniform spacing).
inline double hat_slope(const BasisNode& node, int atom) {
    const double sl = 1.0 / (node.atom - node.left_anchor);
    const double sr = -1.0 / (node.right_anchor - node.atom);
    if (atom < node.atom) return sl;
    if (atom > node.atom) return sr;
    return 0.5 * (sl + sr);
}

}  // namespace detail

/// Nodal force sampled through the stress field,
/// F_n ~ -sum_{i in supp} sigma_i phi_n'(y_i) V0. The extrapolation term at
/// the support boundary is dropped; see neglected_boundary_term.
inline double sampled_force(const BasisSet& basis, int node_index, const LocalStressField& field) {
    const BasisNode& node = basis.node(node_index);
    if (node.tag != RegionTag::Coarse)
        throw config_error("sampled_force: node must be a coarse hat");
    double acc = 0.0;
    for (int atom = node.left_anchor; atom <= node.right_anchor; ++atom)
        acc += field.sigma[atom] * detail::hat_slope(node, atom);
    return -acc * field.cell_volume;
}

/// Magnitude of the boundary extrapolation term dropped by sampled_force:
/// bonds crossing the support edge contribute
/// f_ij [phi_n(y_i) + 0.5 (y_j - y_i) phi_n'(y_i)].
inline double neglected_boundary_term(const LatticeModel& model, const BasisSet& basis,
                                      int node_index, const Vector& u_full) {
    const BasisNode& node = basis.node(node_index);
    if (node.tag != RegionTag::Coarse)
        throw config_error("neglected_boundary_term: node must be a coarse hat");
    const PairForces pf = pair_forces(model, u_full);
    double acc = 0.0;
    const int lo = node.left_anchor, hi = node.right_anchor;
    if (lo - 1 >= 0) acc += pf(lo, lo - 1) * (0.0 + 0.5 * (-1.0) * detail::hat_slope(node, lo));
    if (hi + 1 < model.n_atoms())
        acc += pf(hi, hi + 1) * (0.0 + 0.5 * (+1.0) * detail::hat_slope(node, hi));
    return acc;
}

enum class MassRule { ExactSum, Integral };

/// Mass matrix by exact summation or by the closed-form integral
/// (1/V0) int phi_m phi_n: a ramp of width w contributes w/3 to the
/// diagonal and w/6 to the overlap of the two hats sharing it. Entries
/// involving atomistic identity columns are always summed exactly.
inline Matrix quadrature_mass(const BasisSet& basis, MassRule rule) {
    if (rule == MassRule::ExactSum) return mass_matrix(basis);
    const int m = basis.size();
    Matrix out = Matrix::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            const BasisNode& a = basis.node(i);
            const BasisNode& b = basis.node(j);
            double v = 0.0;
            if (a.tag == RegionTag::Coarse && b.tag == RegionTag::Coarse) {
                if (i == j)
                    v = (a.atom - a.left_anchor) / 3.0 + (a.right_anchor - a.atom) / 3.0;
                else if (a.right_anchor == b.atom && b.left_anchor == a.atom)
                    v = (b.atom - a.atom) / 6.0;
                else if (b.right_anchor == a.atom && a.left_anchor == b.atom)
                    v = (a.atom - b.atom) / 6.0;
            } else {
                v = basis.phi().col(i).dot(basis.phi().col(j));
            }
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

}  // namespace cgmd
