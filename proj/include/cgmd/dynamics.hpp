// Time integration: velocity Verlet for full and reduced second-order
// systems, a trapezoidal Volterra integrator for the memory-kernel
// equation, and energy diagnostics.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cgmd/reduction.hpp"

namespace cgmd {

struct IntegratorConfig {
    double dt = 0.01;
    int n_steps = 0;
    int record_every = 1;

    void validate() const {
        if (!(dt > 0.0)) throw config_error("IntegratorConfig: dt must be positive");
        if (n_steps < 0) throw config_error("IntegratorConfig: n_steps must be nonnegative");
        if (record_every < 1) throw config_error("IntegratorConfig: record_every must be >= 1");
    }
};

/// Recorded states of one integration run. coords are in the coordinates of
/// the integrated system; reconstruction (empty = identity) maps them back
/// to free-atom displacements.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> coords;
    std::vector<Vector> velocities;
    Matrix reconstruction;

    int snapshots() const { return static_cast<int>(times.size()); }
    Vector displacement(int k) const {
        return reconstruction.size() ? Vector(reconstruction * coords[k]) : coords[k];
    }
    Vector velocity_field(int k) const {
        return reconstruction.size() ? Vector(reconstruction * velocities[k]) : velocities[k];
    }
};

/// Integration aborted by a force blow-up; carries the states recorded up to
/// the last valid step.
struct aborted_trajectory : numeric_error {
    aborted_trajectory(const std::string& what, Trajectory partial_)
        : numeric_error(what), partial(std::move(partial_)) {}
    Trajectory partial;
};

namespace detail {

template <typename Accel>
Trajectory verlet_loop(const Accel& accel, const Vector& x0, const Vector& v0,
                       const IntegratorConfig& cfg, Matrix reconstruction) {
    cfg.validate();
    if (x0.size() != v0.size()) throw config_error("verlet: coordinate/velocity size mismatch");

    Trajectory traj;
    traj.reconstruction = std::move(reconstruction);
    auto record = [&](int step, const Vector& x, const Vector& v) {
        traj.times.push_back(step * cfg.dt);
        traj.coords.push_back(x);
        traj.velocities.push_back(v);
    };

    Vector x = x0, v = v0;
    try {
        Vector a = accel(x);
        record(0, x, v);
        for (int k = 0; k < cfg.n_steps; ++k) {
            x += cfg.dt * v + (0.5 * cfg.dt * cfg.dt) * a;
            Vector a_new = accel(x);
            v += 0.5 * cfg.dt * (a + a_new);
            a = std::move(a_new);
            if ((k + 1) % cfg.record_every == 0 || k + 1 == cfg.n_steps) record(k + 1, x, v);
        }
    } catch (const simulation_blowup& e) {
        throw aborted_trajectory(e.what(), std::move(traj));
    }
    return traj;
}

}  // namespace detail

/// Velocity Verlet on the full atomistic model (unit masses).
inline Trajectory verlet_integrate(const LatticeModel& model, const Vector& u0_free,
                                   const Vector& v0_free, const IntegratorConfig& cfg) {
    auto accel = [&model](const Vector& u) -> Vector { return model.force_free(u); };
    return detail::verlet_loop(accel, u0_free, v0_free, cfg, Matrix());
}

/// Velocity Verlet on a reduced system; the mass is factored once.
inline Trajectory verlet_integrate(const ReducedSystem& sys, const Vector& x0, const Vector& v0,
                                   const IntegratorConfig& cfg) {
    Eigen::LLT<Matrix> llt(sys.mass);
    if (llt.info() != Eigen::Success)
        throw numeric_error("verlet_integrate: reduced mass is not positive definite");
    auto accel = [&](const Vector& x) -> Vector { return llt.solve(sys.force(x)); };
    return detail::verlet_loop(accel, x0, v0, cfg, sys.reconstruction);
}

/// Integrates  M qdd = -K q + int_0^t Theta(t - tau) q(tau) dtau + g(t)
/// with the memory integral under the composite trapezoidal rule on the
/// step grid. Kernel values are cached on the grid; the full history is
/// kept, so a run costs O(n_steps^2 m^2). Null kernel/forcing mean zero.
inline Trajectory volterra_integrate(const Matrix& mass, const Matrix& stiffness,
                                     const std::function<Matrix(double)>& kernel,
                                     const std::function<Vector(double)>& forcing,
                                     const Vector& q0, const Vector& v0,
                                     const IntegratorConfig& cfg) {
    cfg.validate();
    const int m = static_cast<int>(q0.size());
    Eigen::LLT<Matrix> llt(mass);
    if (llt.info() != Eigen::Success)
        throw numeric_error("volterra_integrate: mass is not positive definite");

    std::vector<Matrix> theta(cfg.n_steps + 1);
    if (kernel)
        for (int j = 0; j <= cfg.n_steps; ++j) theta[j] = kernel(j * cfg.dt);
    std::vector<Vector> g(cfg.n_steps + 1);
    for (int j = 0; j <= cfg.n_steps; ++j) g[j] = forcing ? forcing(j * cfg.dt) : Vector::Zero(m);

    std::vector<Vector> history;
    history.reserve(cfg.n_steps + 1);
    auto memory_sum = [&](int k) -> Vector {
        // trapezoid over [0, t_k]: half weights at both endpoints
        Vector acc = Vector::Zero(m);
        if (!kernel || k == 0) return acc;
        acc = 0.5 * (theta[k] * history[0]) + 0.5 * (theta[0] * history[k]);
        for (int j = 1; j < k; ++j) acc += theta[k - j] * history[j];
        return cfg.dt * acc;
    };

    Trajectory traj;
    auto record = [&](int step, const Vector& x, const Vector& v) {
        traj.times.push_back(step * cfg.dt);
        traj.coords.push_back(x);
        traj.velocities.push_back(v);
    };

    Vector x = q0, v = v0;
    history.push_back(x);
    Vector a = llt.solve(-(stiffness * x) + memory_sum(0) + g[0]);
    record(0, x, v);
    for (int k = 0; k < cfg.n_steps; ++k) {
        x += cfg.dt * v + (0.5 * cfg.dt * cfg.dt) * a;
        history.push_back(x);
        // the endpoint of the memory integral is evaluated at the updated
        // position (the corrector pass of the two-stage step)
        Vector a_new = llt.solve(-(stiffness * x) + memory_sum(k + 1) + g[k + 1]);
        v += 0.5 * cfg.dt * (a + a_new);
        a = std::move(a_new);
        if ((k + 1) % cfg.record_every == 0 || k + 1 == cfg.n_steps) record(k + 1, x, v);
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Energy diagnostics

struct RegionEnergy {
    double total = 0.0;
    double left = 0.0;
    double right = 0.0;
};

/// Kinetic plus pair energy (relative to the reference configuration).
inline double total_energy(const LatticeModel& model, const Vector& u_free, const Vector& v_free) {
    return 0.5 * v_free.squaredNorm() + model.potential_energy(model.to_full(u_free));
}

/// Pair-sum energy split at split_atom (atoms >= split_atom are "right");
/// each bond contributes half to each endpoint's region, so
/// left + right == total exactly.
inline RegionEnergy region_energy(const LatticeModel& model, const Vector& u_free,
                                  const Vector& v_free, int split_atom) {
    RegionEnergy e;
    const Vector u = model.to_full(u_free);
    for (int k = 0; k < model.n_free(); ++k) {
        const double kin = 0.5 * v_free[k] * v_free[k];
        (model.free_atoms()[k] < split_atom ? e.left : e.right) += kin;
    }
    const double e0 = model.potential().energy(1.0);
    for (int j = 0; j + 1 < model.n_atoms(); ++j) {
        const double r = 1.0 + u[j + 1] - u[j];
        const double pe = model.potential().energy(r) - e0;
        (j < split_atom ? e.left : e.right) += 0.5 * pe;
        (j + 1 < split_atom ? e.left : e.right) += 0.5 * pe;
    }
    e.total = e.left + e.right;
    return e;
}

/// Quadratic (linearized) wave energy: 0.5 v^2 per atom plus
/// 0.5 keff (u_{j+1} - u_j)^2 per bond, split half-half. Positive definite,
/// which keeps reflection fractions in [0, 1] regardless of anharmonicity.
inline RegionEnergy region_wave_energy(const LatticeModel& model, const Vector& u_free,
                                       const Vector& v_free, int split_atom) {
    RegionEnergy e;
    const Vector u = model.to_full(u_free);
    for (int k = 0; k < model.n_free(); ++k) {
        const double kin = 0.5 * v_free[k] * v_free[k];
        (model.free_atoms()[k] < split_atom ? e.left : e.right) += kin;
    }
    const double keff = model.effective_stiffness();
    for (int j = 0; j + 1 < model.n_atoms(); ++j) {
        const double d = u[j + 1] - u[j];
        const double pe = 0.5 * keff * d * d;
        (j < split_atom ? e.left : e.right) += 0.5 * pe;
        (j + 1 < split_atom ? e.left : e.right) += 0.5 * pe;
    }
    e.total = e.left + e.right;
    return e;
}

/// Reduced Hamiltonian 0.5 v^T M v + 0.5 x^T K x of a linearized system.
inline double reduced_energy(const ReducedSystem& sys, const Vector& x, const Vector& v) {
    if (!sys.stiffness)
        throw config_error("reduced_energy: system has no stored stiffness (not linearized)");
    return 0.5 * v.dot(sys.mass * v) + 0.5 * x.dot(*sys.stiffness * x);
}

}  // namespace cgmd
