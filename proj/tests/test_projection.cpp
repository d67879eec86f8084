#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cgmd/projection.hpp"

using namespace cgmd;

namespace {

std::mt19937_64 rng(99);

double uniform() { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; }

Matrix random_matrix(int rows, int cols) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = uniform();
    return m;
}

Vector random_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform();
    return v;
}

Matrix random_spd(int n) {
    const Matrix b = random_matrix(n, n);
    return b * b.transpose() + 0.1 * Matrix::Identity(n, n);
}

BasisSet random_basis(int n, int m) {
    std::vector<BasisNode> nodes(m, BasisNode{0, RegionTag::Coarse, 0, 0});
    return BasisSet(random_matrix(n, m), std::move(nodes), n);
}

BasisSet five_atom_basis(const LatticeModel& model) {
    return build_hybrid_basis(model, 2, 5);
}

}  // namespace

TEST_CASE("orthogonal projector of the identity basis") {
    const auto model = LatticeModel::chain(8, Potential::harmonic(1.0));
    const auto pq = orthogonal_projector(identity_basis(model));
    CHECK((pq.P - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(pq.Q.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("projector algebra and trace") {
    const auto model = LatticeModel::chain(48, Potential::lennard_jones());
    const BasisSet basis = build_hybrid_basis(model, 4, 24);
    const auto pq = orthogonal_projector(basis);
    CHECK((pq.P * pq.P - pq.P).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pq.P - pq.P.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pq.P + pq.Q - Matrix::Identity(pq.P.rows(), pq.P.cols())).cwiseAbs().maxCoeff() == 0.0);
    CHECK((pq.P * pq.Q).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pq.P * basis.phi() - basis.phi()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((pq.Q * basis.phi()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(pq.P.trace() == Catch::Approx(basis.size()).margin(1e-9));
}

TEST_CASE("five-atom projector spot value") {
    const auto model = LatticeModel::chain(5, Potential::harmonic(1.0));
    const auto pq = orthogonal_projector(five_atom_basis(model));
    // P = Phi Phi^T / (3/2); the middle free atom carries P = 2/3
    CHECK(pq.P(1, 1) == Catch::Approx(2.0 / 3.0).margin(1e-14));
}

TEST_CASE("Ritz projector reproduces the subspace and is A-orthogonal") {
    const auto model = LatticeModel::chain(16, Potential::harmonic(1.0));
    const Matrix a = model.linearize();
    const BasisSet basis = build_hybrid_basis(model, 2, 8);
    const auto ritz = ritz_projector(basis, a);
    CHECK((ritz.P * ritz.P - ritz.P).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ritz.P * basis.phi() - basis.phi()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((basis.phi().transpose() * a * ritz.Q).cwiseAbs().maxCoeff() < 1e-9);

    // a(Qhat u, phi) = 0 for every basis column, with the bilinear form
    // evaluated independently over bonds
    const Vector u = random_vector(model.n_free());
    const Vector qu = model.to_full(ritz.Q * u);
    for (int c = 0; c < basis.size(); ++c) {
        const Vector phi = model.to_full(basis.phi().col(c));
        double form = 0.0;
        for (int j = 0; j + 1 < model.n_atoms(); ++j)
            form += (qu[j + 1] - qu[j]) * (phi[j + 1] - phi[j]);
        REQUIRE(form == Catch::Approx(0.0).margin(1e-9));
    }

    const auto id = ritz_projector(identity_basis(model), a);
    CHECK((id.P - Matrix::Identity(14, 14)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("qaq_spectrum of the identity basis is all zero") {
    const auto model = LatticeModel::chain(8, Potential::harmonic(1.0));
    const BasisSet basis = identity_basis(model);
    const auto spec = qaq_spectrum(model.linearize(), orthogonal_projector(basis), basis);
    CHECK(spec.mode_count() == 0);
    CHECK(spec.zero_count == 6);
}

TEST_CASE("five-atom spectrum: kernel dimension equals m") {
    const auto model = LatticeModel::chain(5, Potential::harmonic(1.0));
    const BasisSet basis = five_atom_basis(model);
    const Matrix a = model.linearize();
    const auto spec = qaq_spectrum(a, orthogonal_projector(basis), basis);
    CHECK(spec.zero_count == 1);
    CHECK(spec.mode_count() == 2);

    // nonzero eigenvalues of QAQ match those of the nonsymmetric AQ
    Eigen::EigenSolver<Matrix> es(Matrix(a * orthogonal_projector(basis).Q));
    std::vector<double> aq;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        REQUIRE(std::abs(es.eigenvalues()[i].imag()) < 1e-10);
        if (std::abs(es.eigenvalues()[i].real()) > 1e-8) aq.push_back(es.eigenvalues()[i].real());
    }
    std::sort(aq.begin(), aq.end());
    REQUIRE(aq.size() == 2);
    CHECK(aq[0] == Catch::Approx(spec.mode_lambda[0]).margin(1e-8));
    CHECK(aq[1] == Catch::Approx(spec.mode_lambda[1]).margin(1e-8));
}

TEST_CASE("Lemma reconstructions on a random instance") {
    const int n = 24, m = 7;
    const Matrix a = random_spd(n);
    const BasisSet basis = random_basis(n, m);
    const auto pq = orthogonal_projector(basis);
    const auto spec = qaq_spectrum(a, pq, basis);

    const Matrix qaq = pq.Q * a * pq.Q;
    // QAQ eta = lambda eta and eigenvector orthonormality
    for (int i = 0; i < spec.mode_count(); ++i)
        REQUIRE((qaq * spec.mode_eta.col(i) - spec.mode_lambda[i] * spec.mode_eta.col(i))
                    .cwiseAbs()
                    .maxCoeff() < 1e-8 * spec.mode_lambda.maxCoeff());
    CHECK((spec.mode_eta.transpose() * spec.mode_eta - Matrix::Identity(n - m, n - m))
              .cwiseAbs()
              .maxCoeff() < 1e-10);

    // QAQ = sum lambda eta eta^T
    const Matrix qaq_sum =
        spec.mode_eta * spec.mode_lambda.asDiagonal() * spec.mode_eta.transpose();
    CHECK((qaq - qaq_sum).cwiseAbs().maxCoeff() < 1e-8 * spec.mode_lambda.maxCoeff());

    // Q = sum over nonzero modes of eta eta^T
    const Matrix q_sum = spec.mode_eta * spec.mode_eta.transpose();
    CHECK((pq.Q - q_sum).cwiseAbs().maxCoeff() < 1e-8);

    // AQ = sum lambda xi eta^T with xi = A eta / lambda
    Matrix aq_sum = Matrix::Zero(n, n);
    for (int i = 0; i < spec.mode_count(); ++i)
        aq_sum += (a * spec.mode_eta.col(i)) * spec.mode_eta.col(i).transpose();
    CHECK((a * pq.Q - aq_sum).cwiseAbs().maxCoeff() < 1e-8 * spec.mode_lambda.maxCoeff());

    // the subspace is annihilated
    CHECK((qaq * basis.phi()).cwiseAbs().maxCoeff() < 1e-8 * spec.mode_lambda.maxCoeff());
    CHECK(spec.zero_count == m);
}

TEST_CASE("kernel dimension grows with ker(A) intersecting the complement") {
    // PSD A with a one-dimensional kernel orthogonal to the basis range
    const int n = 12, m = 3;
    Matrix u = random_matrix(n, n);
    const Eigen::HouseholderQR<Matrix> qr(u);
    const Matrix v = qr.householderQ();
    Vector d(n);
    for (int i = 0; i < n; ++i) d[i] = 0.5 + i;
    d[0] = 0.0;  // kernel direction v.col(0)
    const Matrix a = v * d.asDiagonal() * v.transpose();

    // basis orthogonal to the kernel direction: columns v_1..v_m
    Matrix phi = v.middleCols(1, m);
    std::vector<BasisNode> nodes(m, BasisNode{0, RegionTag::Coarse, 0, 0});
    const BasisSet basis(phi, std::move(nodes), n);
    const auto spec = qaq_spectrum(a, orthogonal_projector(basis), basis);
    // dim ker(QAQ) = m + dim(ker A in the orthogonal complement) = m + 1
    CHECK(spec.zero_count == m + 1);
}

TEST_CASE("memory kernel vanishes at zero and has derivative K2-tilde") {
    const auto model = LatticeModel::chain(16, Potential::harmonic(1.0));
    const BasisSet basis = build_hybrid_basis(model, 2, 8);
    const Matrix a = model.linearize();
    const auto pq = orthogonal_projector(basis);
    const auto spec = qaq_spectrum(a, pq, basis);

    CHECK(memory_kernel(spec, 0.0).cwiseAbs().maxCoeff() == 0.0);

    // oracle: Theta'(0) = Phi^T A Q A Phi by direct matrix product
    const Matrix k2t = basis.phi().transpose() * a * pq.Q * a * basis.phi();
    const double h = 1e-4;
    const Matrix fd = (memory_kernel(spec, h) - memory_kernel(spec, -h)) / (2.0 * h);
    CHECK((fd - k2t).cwiseAbs().maxCoeff() < 1e-6 * k2t.cwiseAbs().maxCoeff());

    // symmetry at sampled times
    for (double t : {0.3, 1.7, 6.0}) {
        const Matrix th = memory_kernel(spec, t);
        REQUIRE((th - th.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("kernel locality on a hybrid chain") {
    const auto model = LatticeModel::chain(256, Potential::lennard_jones());
    const BasisSet basis = build_hybrid_basis(model, 8, 128);
    const Matrix a = model.linearize();
    const auto spec = qaq_spectrum(a, orthogonal_projector(basis), basis);

    auto max_over_time = [&](int node) {
        double peak = 0.0;
        for (double t = 0.0; t <= 50.0; t += 0.25)
            peak = std::max(peak, std::abs(memory_kernel_diagonal(spec, node, t)));
        return peak;
    };

    const int iface = basis.interface_index();
    const double at_interface = max_over_time(iface);
    // probe the window around the interface: the interface node dominates
    for (int c = iface - 6; c <= iface + 12; ++c) {
        if (c == iface) continue;
        REQUIRE(max_over_time(c) <= at_interface);
    }
    // nodes ten or more atoms inside the MD region carry nothing
    for (int c = iface + 10; c < iface + 20; ++c) REQUIRE(max_over_time(c) < 1e-10);
}

TEST_CASE("forcing vanishes for data in the subspace") {
    const auto model = LatticeModel::chain(16, Potential::harmonic(1.0));
    const BasisSet basis = build_hybrid_basis(model, 2, 8);
    const Matrix a = model.linearize();
    const auto spec = qaq_spectrum(a, orthogonal_projector(basis), basis);
    const Vector u0 = basis.phi() * random_vector(basis.size());
    const Vector v0 = basis.phi() * random_vector(basis.size());
    for (double t : {0.0, 0.5, 3.0, 11.0})
        REQUIRE(forcing_g(spec, u0, v0, t).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("forcing at t = 0 reduces to -Phi^T A Q u0") {
    const auto model = LatticeModel::chain(16, Potential::harmonic(1.0));
    const BasisSet basis = build_hybrid_basis(model, 2, 8);
    const Matrix a = model.linearize();
    const auto pq = orthogonal_projector(basis);
    const auto spec = qaq_spectrum(a, pq, basis);
    const Vector u0 = random_vector(model.n_free());
    const Vector expected = -basis.phi().transpose() * (a * (pq.Q * u0));
    CHECK((forcing_g(spec, u0, Vector::Zero(model.n_free()), 0.0) - expected)
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("forcing matches the fundamental-solution route") {
    const auto model = LatticeModel::chain(16, Potential::harmonic(1.0));
    const BasisSet basis = build_hybrid_basis(model, 2, 8);
    const Matrix a = model.linearize();
    const auto pq = orthogonal_projector(basis);
    const auto spec = qaq_spectrum(a, pq, basis);
    const Vector u0 = random_vector(model.n_free());
    const Vector v0 = random_vector(model.n_free());
    for (double t : {0.0, 0.4, 1.9, 7.3}) {
        const auto [c, s] = fundamental_solutions(spec, a, t);
        const Vector expected =
            -basis.phi().transpose() * (c * (a * (pq.Q * u0)) + s * (a * (pq.Q * v0)));
        REQUIRE((forcing_g(spec, u0, v0, t) - expected).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("fundamental solutions satisfy their defining relations") {
    const auto model = LatticeModel::chain(16, Potential::harmonic(1.0));
    const BasisSet basis = build_hybrid_basis(model, 2, 8);
    const Matrix a = model.linearize();
    const auto pq = orthogonal_projector(basis);
    const auto spec = qaq_spectrum(a, pq, basis);
    const Matrix aq = a * pq.Q;
    const int n = model.n_free();

    const auto [c0, s0] = fundamental_solutions(spec, a, 0.0);
    CHECK((c0 - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(s0.cwiseAbs().maxCoeff() < 1e-12);

    const double h = 1e-4;
    for (double t : {0.5, 1.0, 2.0}) {
        const auto [c, s] = fundamental_solutions(spec, a, t);
        const auto [cp, sp] = fundamental_solutions(spec, a, t + h);
        const auto [cm, sm] = fundamental_solutions(spec, a, t - h);
        // dS/dt = C
        CHECK(((sp - sm) / (2.0 * h) - c).cwiseAbs().maxCoeff() < 1e-6);
        // Cdd + AQ C = 0 by second differences
        const Matrix cdd = (cp - 2.0 * c + cm) / (h * h);
        CHECK((cdd + aq * c).cwiseAbs().maxCoeff() < 1e-6);
    }
}
