#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cgmd/lattice.hpp"

using namespace cgmd;

namespace {

// Independent oracle: total pair energy of a full displacement field,
// summed bond by bond straight from the potential.
double chain_energy(const Potential& pot, const Vector& u_full) {
    double e = 0.0;
    for (int j = 0; j + 1 < u_full.size(); ++j)
        e += pot.energy(1.0 + u_full[j + 1] - u_full[j]) - pot.energy(1.0);
    return e;
}

Vector random_displacement(const LatticeModel& model, double amplitude, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    Vector u = Vector::Zero(model.n_atoms());
    for (int j = 0; j < model.n_atoms(); ++j) {
        const double r = 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0;
        if (!model.is_clamped(j)) u[j] = amplitude * r;
    }
    return u;
}

}  // namespace

TEST_CASE("pair_potential matches the frozen analytic values") {
    const auto lj1 = pair_potential(Potential::lennard_jones(), 1.0);
    CHECK(lj1.energy == Catch::Approx(0.0).margin(1e-15));
    CHECK(lj1.derivative == Catch::Approx(-6.0).epsilon(1e-14));

    const double rmin = std::pow(2.0, 1.0 / 6.0);
    const auto ljmin = pair_potential(Potential::lennard_jones(), rmin);
    CHECK(ljmin.energy == Catch::Approx(-0.25).epsilon(1e-14));
    CHECK(ljmin.derivative == Catch::Approx(0.0).margin(1e-14));

    const auto h = pair_potential(Potential::harmonic(1.0), 1.1);
    CHECK(h.energy == Catch::Approx(0.005).epsilon(1e-14));
    CHECK(h.derivative == Catch::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("pair_potential derivative agrees with a central difference of V") {
    const double eps = 1e-6;
    for (const Potential pot : {Potential::lennard_jones(), Potential::harmonic(2.5)}) {
        for (double r : {0.9, 1.0, 1.1225, 1.5, 2.0}) {
            const double fd = (pot.energy(r + eps) - pot.energy(r - eps)) / (2.0 * eps);
            CHECK(pair_potential(pot, r).derivative == Catch::Approx(fd).margin(1e-10));
        }
    }
}

TEST_CASE("pair_potential rejects non-positive separations") {
    CHECK_THROWS_AS(pair_potential(Potential::lennard_jones(), 0.0), std::domain_error);
    CHECK_THROWS_AS(pair_potential(Potential::harmonic(1.0), -0.5), std::domain_error);
}

TEST_CASE("force vanishes at the reference configuration") {
    for (const Potential pot : {Potential::lennard_jones(), Potential::harmonic(1.0)}) {
        const auto model = LatticeModel::chain(16, pot);
        const Vector f = model.force(Vector::Zero(16));
        CHECK(f.cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("force is the negative gradient of the pair energy") {
    const auto model = LatticeModel::chain(12, Potential::lennard_jones());
    const Vector u = random_displacement(model, 1e-3, 2024);
    const Vector f = model.force(u);
    const double eps = 1e-6;
    for (int k = 0; k < 12; ++k) {
        if (model.is_clamped(k)) {
            CHECK(f[k] == 0.0);
            continue;
        }
        Vector up = u, um = u;
        up[k] += eps;
        um[k] -= eps;
        const double fd = -(chain_energy(model.potential(), up) -
                            chain_energy(model.potential(), um)) /
                          (2.0 * eps);
        CHECK(f[k] == Catch::Approx(fd).margin(1e-6));
    }
}

TEST_CASE("energy gradient consistency over 100 random states") {
    const auto model = LatticeModel::chain(24, Potential::lennard_jones());
    const double eps = 1e-6;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Vector u = random_displacement(model, 1e-3, 1000 + seed);
        const Vector f = model.force(u);
        // spot-check a moving subset of components to keep the run fast
        for (int k = 1 + static_cast<int>(seed % 3); k < 23; k += 3) {
            Vector up = u, um = u;
            up[k] += eps;
            um[k] -= eps;
            const double fd = -(chain_energy(model.potential(), up) -
                                chain_energy(model.potential(), um)) /
                              (2.0 * eps);
            REQUIRE(f[k] == Catch::Approx(fd).margin(1e-6));
        }
    }
}

TEST_CASE("force throws on atom crossing") {
    const auto model = LatticeModel::chain(8, Potential::lennard_jones());
    Vector u = Vector::Zero(8);
    u[3] = 1.5;  // pushes atom 3 past atom 4
    CHECK_THROWS_AS(model.force(u), simulation_blowup);
}

TEST_CASE("linearize reproduces the clamped harmonic tridiagonal") {
    const auto model = LatticeModel::chain(5, Potential::harmonic(1.0));
    const Matrix a = model.linearize();
    REQUIRE(a.rows() == 3);
    Matrix expected(3, 3);
    expected << 2, -1, 0, -1, 2, -1, 0, -1, 2;
    CHECK((a - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("linearize of the Lennard-Jones chain has off-diagonal -V''(1) = -114") {
    const auto model = LatticeModel::chain(8, Potential::lennard_jones());
    const Matrix a = model.linearize();
    REQUIRE(a.rows() == 6);
    // analytic oracle: V''(r) = 156 r^-14 - 42 r^-8 at r = 1
    const double kappa = 156.0 - 42.0;
    for (int i = 0; i < 6; ++i) {
        CHECK(a(i, i) == Catch::Approx(2.0 * kappa).epsilon(1e-6));
        if (i + 1 < 6) CHECK(a(i, i + 1) == Catch::Approx(-kappa).epsilon(1e-6));
    }
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("force constant matrix of a clamped uniform chain is positive definite") {
    for (const Potential pot : {Potential::lennard_jones(), Potential::harmonic(1.0)}) {
        const auto model = LatticeModel::chain(20, pot);
        const Matrix a = model.linearize();
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
}

TEST_CASE("linearization remainder is quadratic in the displacement") {
    const auto model = LatticeModel::chain(16, Potential::lennard_jones());
    const Matrix a = model.linearize();
    const Vector dir = model.to_free(random_displacement(model, 1.0, 7));
    std::vector<double> ratio;
    for (double scale : {1e-2, 1e-3, 1e-4}) {
        const Vector u = (scale / dir.cwiseAbs().maxCoeff()) * dir;
        const double remainder = (model.force_free(u) + a * u).norm();
        ratio.push_back(remainder / u.squaredNorm());
    }
    // the constant C = ||f(u) + A u|| / ||u||^2 must be stable across scales
    const double lo = *std::min_element(ratio.begin(), ratio.end());
    const double hi = *std::max_element(ratio.begin(), ratio.end());
    CHECK(hi / lo < 2.0);
}

TEST_CASE("dispersion relation") {
    const auto unit = LatticeModel::chain(8, Potential::harmonic(1.0));
    CHECK(unit.dispersion(0.0) == 0.0);
    CHECK(unit.dispersion(std::acos(-1.0)) == Catch::Approx(2.0).epsilon(1e-14));
    CHECK(unit.dispersion(std::acos(-1.0) / 3.0) == Catch::Approx(1.0).epsilon(1e-14));

    const auto lj = LatticeModel::chain(8, Potential::lennard_jones());
    CHECK(lj.effective_stiffness() == Catch::Approx(114.0).epsilon(1e-14));
    CHECK(lj.dispersion(1.0) ==
          Catch::Approx(2.0 * std::sqrt(114.0) * std::sin(0.5)).epsilon(1e-14));
}
