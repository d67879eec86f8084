// Nodal basis construction: piecewise-linear hat functions over a coarse
// mesh, identity columns over the atomistic region, and the generalized
// stiffness matrices K_l = Phi^T A^l Phi.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cgmd/lattice.hpp"

namespace cgmd {

enum class RegionTag { Coarse, Atomistic };

struct BasisNode {
    int atom;        // atom carrying the nodal value 1
    RegionTag tag;
    int left_anchor;   // support start (value 0 there); == atom for identity columns
    int right_anchor;  // support end
};

/// The interpolation matrix Phi over free degrees of freedom, one column per
/// node. Coarse columns are hat functions spanning [left_anchor, right_anchor];
/// atomistic columns are canonical unit vectors. Immutable after construction.
class BasisSet {
  public:
    BasisSet(Matrix phi, std::vector<BasisNode> nodes, int interface_atom)
        : phi_(std::move(phi)), nodes_(std::move(nodes)), interface_atom_(interface_atom) {
        interface_index_ = size();
        for (int c = 0; c < size(); ++c)
            if (nodes_[c].tag == RegionTag::Atomistic) {
                interface_index_ = c;
                break;
            }
    }

    const Matrix& phi() const { return phi_; }
    int size() const { return static_cast<int>(phi_.cols()); }
    int n_free() const { return static_cast<int>(phi_.rows()); }
    const std::vector<BasisNode>& nodes() const { return nodes_; }
    const BasisNode& node(int c) const { return nodes_[c]; }
    /// Column index of the first atomistic node (== size() when none).
    int interface_index() const { return interface_index_; }
    /// First atom of the atomistic region (== n_atoms when none).
    int interface_atom() const { return interface_atom_; }

  private:
    Matrix phi_;
    std::vector<BasisNode> nodes_;
    int interface_atom_;
    int interface_index_;
};

/// One identity column per free atom; the basis of the full MD model.
inline BasisSet identity_basis(const LatticeModel& model) {
    const int nf = model.n_free();
    std::vector<BasisNode> nodes;
    nodes.reserve(nf);
    for (int atom : model.free_atoms())
        nodes.push_back({atom, RegionTag::Atomistic, atom, atom});
    return BasisSet(Matrix::Identity(nf, nf), std::move(nodes), model.free_atoms().front());
}

namespace detail {

// Hats between consecutive coarse nodes plus identity columns from
// atomistic_start on. Anchors: atom 0 on the left, atomistic_start (or the
// last atom) on the right, so the final hat decays to zero exactly where the
// identity region begins.
inline BasisSet assemble_basis(const LatticeModel& model, const std::vector<int>& coarse_nodes,
                               int atomistic_start) {
    const int n = model.n_atoms();
    const int nf = model.n_free();
    if (atomistic_start < 0 || atomistic_start > n)
        throw config_error("basis: atomistic_start out of range");

    const int right_anchor = atomistic_start == n ? n - 1 : atomistic_start;
    std::vector<int> anchors;  // coarse node grid with boundary anchors
    anchors.push_back(0);
    for (int a : coarse_nodes) {
        if (a <= anchors.back() || a >= right_anchor)
            throw config_error("basis: coarse nodes must be ascending and inside the coarse region");
        anchors.push_back(a);
    }
    anchors.push_back(right_anchor);

    std::vector<BasisNode> nodes;
    std::vector<Vector> cols;
    for (std::size_t i = 1; i + 1 < anchors.size(); ++i) {
        const int atom = anchors[i];
        if (model.is_clamped(atom)) continue;
        const int lo = anchors[i - 1], hi = anchors[i + 1];
        Vector col = Vector::Zero(nf);
        for (int j = lo; j <= hi; ++j) {
            const int slot = model.free_slot(j);
            if (slot < 0) continue;
            const double v = j <= atom ? static_cast<double>(j - lo) / (atom - lo)
                                       : static_cast<double>(hi - j) / (hi - atom);
            col[slot] = v;
        }
        cols.push_back(std::move(col));
        nodes.push_back({atom, RegionTag::Coarse, lo, hi});
    }
    for (int j = atomistic_start; j < n; ++j) {
        const int slot = model.free_slot(j);
        if (slot < 0) continue;
        Vector col = Vector::Zero(nf);
        col[slot] = 1.0;
        cols.push_back(std::move(col));
        nodes.push_back({j, RegionTag::Atomistic, j, j});
    }
    if (cols.empty()) throw config_error("basis: no free nodes");

    Matrix phi(nf, static_cast<int>(cols.size()));
    for (int c = 0; c < phi.cols(); ++c) phi.col(c) = cols[c];
    return BasisSet(std::move(phi), std::move(nodes), atomistic_start);
}

}  // namespace detail

/// Hybrid basis: hats every mesh_size atoms over [0, atomistic_start),
/// identity columns over [atomistic_start, n). mesh_size must divide the
/// coarse-region length. atomistic_start == n_atoms gives a pure coarse mesh.
inline BasisSet build_hybrid_basis(const LatticeModel& model, int mesh_size, int atomistic_start) {
    if (mesh_size < 1) throw config_error("basis: mesh_size must be >= 1");
    // The coarse mesh is anchored at atom 0 and at the start of the identity
    // region (the last atom when there is none).
    const int right = atomistic_start == model.n_atoms() ? model.n_atoms() - 1 : atomistic_start;
    if (right % mesh_size != 0)
        throw config_error("basis: mesh_size must divide the coarse-region length");
    std::vector<int> coarse;
    for (int a = mesh_size; a < right; a += mesh_size) coarse.push_back(a);
    return detail::assemble_basis(model, coarse, atomistic_start);
}

/// Explicit coarse node positions (for slowly varying meshes); hat widths are
/// inferred from neighboring nodes.
inline BasisSet build_basis_from_nodes(const LatticeModel& model, const std::vector<int>& node_atoms,
                                       int atomistic_start) {
    return detail::assemble_basis(model, node_atoms, atomistic_start);
}

/// M = Phi^T Phi. Throws numeric_error when the columns are dependent.
inline Matrix mass_matrix(const BasisSet& basis) {
    Matrix m = basis.phi().transpose() * basis.phi();
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw numeric_error("mass_matrix: basis columns are dependent");
    return m;
}

/// K_l = Phi^T A^l Phi for l = 0..lmax, built by repeated application of A
/// to the basis columns. K_0 coincides bit-for-bit with mass_matrix.
using StiffnessFamily = std::vector<Matrix>;

inline StiffnessFamily stiffness_family(const BasisSet& basis, const Matrix& a, int lmax) {
    if (lmax < 1) throw config_error("stiffness_family: lmax must be >= 1");
    StiffnessFamily family;
    family.reserve(lmax + 1);
    Matrix w = basis.phi();  // A^l Phi
    family.push_back(basis.phi().transpose() * w);
    for (int l = 1; l <= lmax; ++l) {
        w = a * w;
        family.push_back(basis.phi().transpose() * w);
    }
    return family;
}

}  // namespace cgmd
