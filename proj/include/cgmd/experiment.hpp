// Experiment harness: config-driven construction of models, bases, and
// reductions; the wave-packet reflection experiment; trajectory error
// norms; kernel and stability reports.

#pragma once

#include <cmath>
#include <cstdint>
#include <json.hpp>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cgmd/dynamics.hpp"
#include "cgmd/io.hpp"
#include "cgmd/projection.hpp"
#include "cgmd/quadrature.hpp"
#include "cgmd/reduction.hpp"

namespace cgmd {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Wave packets

/// A superposition of left-moving modes confined by a Gaussian envelope
/// F(x) = amplitude * exp(-(x - center)^2 / (2 width^2)).
struct WavePacketSpec {
    double center = 640.0;
    double width = 20.0;
    double amplitude = 0.00025;
    std::vector<double> modes;  // wavenumbers in (0, pi)

    static WavePacketSpec paper_defaults() {
        WavePacketSpec spec;
        for (int k = 0; k <= 20; ++k) spec.modes.push_back(0.5 + 0.02 * k);
        return spec;
    }
};

struct WavePacket {
    Vector u0, v0;  // full length, clamped entries zero
    bool truncated = false;  // significant amplitude fell outside the chain
};

/// u0(x) = F(x) sum_k cos(xi_k x), v0(x) = -F(x) sum_k omega(xi_k) sin(xi_k x)
/// with the model's dispersion omega(xi) = 2 sqrt(keff/m) sin(xi/2), so the
/// packet moves left at the chain's group velocity.
inline WavePacket build_wave_packet(const LatticeModel& model, const WavePacketSpec& spec) {
    if (spec.modes.empty()) throw config_error("wave packet: no modes");
    for (double xi : spec.modes)
        if (!(xi > 0.0 && xi < std::numbers::pi))
            throw config_error("wave packet: modes must lie in (0, pi)");
    if (!(spec.width > 0.0)) throw config_error("wave packet: width must be positive");

    WavePacket packet;
    const int n = model.n_atoms();
    packet.u0 = Vector::Zero(n);
    packet.v0 = Vector::Zero(n);
    auto envelope = [&](double x) {
        const double d = x - spec.center;
        return spec.amplitude * std::exp(-d * d / (2.0 * spec.width * spec.width));
    };
    for (int j = 0; j < n; ++j) {
        if (model.is_clamped(j)) continue;
        double u = 0.0, v = 0.0;
        for (double xi : spec.modes) {
            u += std::cos(xi * j);
            v -= model.dispersion(xi) * std::sin(xi * j);
        }
        packet.u0[j] = envelope(j) * u;
        packet.v0[j] = envelope(j) * v;
    }
    const double edge = std::max(envelope(0.0), envelope(n - 1.0));
    packet.truncated = spec.amplitude > 0.0 && edge > 1e-8 * spec.amplitude;
    return packet;
}

// ---------------------------------------------------------------------------
// Configuration

struct ModelSpec {
    int n_atoms = 0;
    Potential potential = Potential::lennard_jones();
    std::vector<int> clamps;  // empty means both ends
};

struct BasisSpec {
    enum class Kind { Identity, Hybrid, Nodes };
    Kind kind = Kind::Hybrid;
    int mesh_size = 8;
    int atomistic_start = -1;     // -1: no atomistic region (pure coarse)
    std::vector<int> node_atoms;  // Kind::Nodes
};

struct ReductionSpec {
    enum class Kind { Full, Conventional, Extended, Direct };
    Kind kind = Kind::Full;
    ForceModel force = ForceModel::Atomistic;
    int enrich_depth = 10;            // Krylov L
    int selected_coarse = 20;         // coarse nodes nearest the interface
    int selected_atomistic = 5;       // atomistic nodes nearest the interface
    std::vector<int> selected_nodes;  // explicit column indices (overrides counts)
    int expansion_depth = 1;          // direct expansion: 1 or 2
};

struct InitialSpec {
    enum class Kind { Zero, WavePacket, Random, Explicit };
    Kind kind = Kind::Zero;
    WavePacketSpec packet = WavePacketSpec::paper_defaults();
    std::uint64_t seed = 12345;
    double random_amplitude = 1e-3;
    std::vector<double> u0, v0;  // Kind::Explicit, full length
};

struct KernelProbeSpec {
    double t_max = 50.0;
    double dt = 0.1;
    int window = 16;  // probe nodes within this many atoms of the interface
};

struct ExperimentConfig {
    ModelSpec model;
    BasisSpec basis;
    ReductionSpec reduction;
    InitialSpec initial;
    double dt = 0.01;
    double t_final = 80.0;
    int record_every = 50;
    KernelProbeSpec kernel;
    std::string out_dir = "out";
    std::string task = "simulate";  // used by the sweep runner
};

namespace detail {

inline void require_keys(const json& j, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw config_error(std::string("config: unknown key '") + it.key() + "' in " + where);
    }
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
    ExperimentConfig cfg;
    detail::require_keys(j, "root",
                         {"version", "task", "model", "basis", "reduction", "initial",
                          "integrator", "kernel", "output"});
    if (j.value("version", 1) != 1) throw config_error("config: unsupported version");
    if (!j.contains("model")) throw config_error("config: missing model");
    cfg.task = j.value("task", "simulate");
    if (cfg.task != "simulate" && cfg.task != "reflect" && cfg.task != "kernel" &&
        cfg.task != "stability")
        throw config_error("config: unknown task '" + cfg.task + "'");

    {
        const json& m = j.at("model");
        detail::require_keys(m, "model", {"n_atoms", "potential", "kappa", "clamps"});
        cfg.model.n_atoms = m.at("n_atoms").get<int>();
        if (cfg.model.n_atoms < 2) throw config_error("config: n_atoms must be >= 2");
        const std::string pot = m.value("potential", "lennard_jones");
        if (pot == "lennard_jones")
            cfg.model.potential = Potential::lennard_jones();
        else if (pot == "harmonic")
            cfg.model.potential = Potential::harmonic(m.value("kappa", 1.0));
        else
            throw config_error("config: unknown potential '" + pot + "'");
        if (m.contains("clamps") && m.at("clamps").is_array())
            cfg.model.clamps = m.at("clamps").get<std::vector<int>>();
        else
            cfg.model.clamps = {0, cfg.model.n_atoms - 1};
    }

    if (j.contains("basis")) {
        const json& b = j.at("basis");
        detail::require_keys(b, "basis", {"kind", "mesh_size", "atomistic_start", "node_atoms"});
        const std::string kind = b.value("kind", "hybrid");
        if (kind == "identity")
            cfg.basis.kind = BasisSpec::Kind::Identity;
        else if (kind == "hybrid")
            cfg.basis.kind = BasisSpec::Kind::Hybrid;
        else if (kind == "nodes")
            cfg.basis.kind = BasisSpec::Kind::Nodes;
        else
            throw config_error("config: unknown basis kind '" + kind + "'");
        cfg.basis.mesh_size = b.value("mesh_size", 8);
        cfg.basis.atomistic_start = b.value("atomistic_start", -1);
        if (b.contains("node_atoms")) cfg.basis.node_atoms = b.at("node_atoms").get<std::vector<int>>();
    } else {
        cfg.basis.kind = BasisSpec::Kind::Identity;
    }

    if (j.contains("reduction")) {
        const json& r = j.at("reduction");
        detail::require_keys(r, "reduction",
                             {"kind", "force", "enrich_depth", "selected_coarse",
                              "selected_atomistic", "selected_nodes", "expansion_depth"});
        const std::string kind = r.value("kind", "full");
        if (kind == "full")
            cfg.reduction.kind = ReductionSpec::Kind::Full;
        else if (kind == "conventional")
            cfg.reduction.kind = ReductionSpec::Kind::Conventional;
        else if (kind == "extended")
            cfg.reduction.kind = ReductionSpec::Kind::Extended;
        else if (kind == "direct")
            cfg.reduction.kind = ReductionSpec::Kind::Direct;
        else
            throw config_error("config: unknown reduction kind '" + kind + "'");
        const std::string force = r.value("force", "atomistic");
        if (force == "atomistic")
            cfg.reduction.force = ForceModel::Atomistic;
        else if (force == "linearized")
            cfg.reduction.force = ForceModel::Linearized;
        else
            throw config_error("config: unknown force model '" + force + "'");
        cfg.reduction.enrich_depth = r.value("enrich_depth", 10);
        cfg.reduction.selected_coarse = r.value("selected_coarse", 20);
        cfg.reduction.selected_atomistic = r.value("selected_atomistic", 5);
        if (r.contains("selected_nodes"))
            cfg.reduction.selected_nodes = r.at("selected_nodes").get<std::vector<int>>();
        cfg.reduction.expansion_depth = r.value("expansion_depth", 1);
    }

    if (j.contains("initial")) {
        const json& i = j.at("initial");
        detail::require_keys(i, "initial",
                             {"kind", "center", "width", "amplitude", "mode_start", "mode_step",
                              "mode_count", "seed", "random_amplitude", "u0", "v0"});
        const std::string kind = i.value("kind", "zero");
        if (kind == "zero")
            cfg.initial.kind = InitialSpec::Kind::Zero;
        else if (kind == "wave_packet")
            cfg.initial.kind = InitialSpec::Kind::WavePacket;
        else if (kind == "random")
            cfg.initial.kind = InitialSpec::Kind::Random;
        else if (kind == "explicit")
            cfg.initial.kind = InitialSpec::Kind::Explicit;
        else
            throw config_error("config: unknown initial kind '" + kind + "'");
        cfg.initial.packet.center = i.value("center", 640.0);
        cfg.initial.packet.width = i.value("width", 20.0);
        cfg.initial.packet.amplitude = i.value("amplitude", 0.00025);
        if (i.contains("mode_start") || i.contains("mode_step") || i.contains("mode_count")) {
            const double x0 = i.value("mode_start", 0.5);
            const double dx = i.value("mode_step", 0.02);
            const int count = i.value("mode_count", 21);
            cfg.initial.packet.modes.clear();
            for (int k = 0; k < count; ++k) cfg.initial.packet.modes.push_back(x0 + dx * k);
        }
        cfg.initial.seed = i.value("seed", std::uint64_t{12345});
        cfg.initial.random_amplitude = i.value("random_amplitude", 1e-3);
        if (i.contains("u0")) cfg.initial.u0 = i.at("u0").get<std::vector<double>>();
        if (i.contains("v0")) cfg.initial.v0 = i.at("v0").get<std::vector<double>>();
    }

    if (j.contains("integrator")) {
        const json& g = j.at("integrator");
        detail::require_keys(g, "integrator", {"dt", "t_final", "record_every"});
        cfg.dt = g.value("dt", 0.01);
        cfg.t_final = g.value("t_final", 80.0);
        cfg.record_every = g.value("record_every", 50);
        if (!(cfg.dt > 0.0) || !(cfg.t_final >= 0.0) || cfg.record_every < 1)
            throw config_error("config: invalid integrator settings");
    }

    if (j.contains("kernel")) {
        const json& k = j.at("kernel");
        detail::require_keys(k, "kernel", {"t_max", "dt", "window"});
        cfg.kernel.t_max = k.value("t_max", 50.0);
        cfg.kernel.dt = k.value("dt", 0.1);
        cfg.kernel.window = k.value("window", 16);
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        detail::require_keys(o, "output", {"dir"});
        cfg.out_dir = o.value("dir", "out");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Assembly

inline LatticeModel make_model(const ModelSpec& spec) {
    return LatticeModel(spec.n_atoms, spec.potential, spec.clamps);
}

inline BasisSet make_basis(const LatticeModel& model, const BasisSpec& spec) {
    switch (spec.kind) {
        case BasisSpec::Kind::Identity:
            return identity_basis(model);
        case BasisSpec::Kind::Hybrid: {
            const int start = spec.atomistic_start < 0 ? model.n_atoms() : spec.atomistic_start;
            return build_hybrid_basis(model, spec.mesh_size, start);
        }
        case BasisSpec::Kind::Nodes: {
            const int start = spec.atomistic_start < 0 ? model.n_atoms() : spec.atomistic_start;
            return build_basis_from_nodes(model, spec.node_atoms, start);
        }
    }
    throw config_error("make_basis: unreachable");
}

inline WavePacket make_initial(const LatticeModel& model, const InitialSpec& spec) {
    WavePacket state;
    const int n = model.n_atoms();
    switch (spec.kind) {
        case InitialSpec::Kind::Zero:
            state.u0 = Vector::Zero(n);
            state.v0 = Vector::Zero(n);
            return state;
        case InitialSpec::Kind::WavePacket:
            return build_wave_packet(model, spec.packet);
        case InitialSpec::Kind::Random: {
            // mt19937_64 raw output scaled by hand; the distribution is then
            // fully pinned by the standard, so outputs are reproducible.
            std::mt19937_64 gen(spec.seed);
            auto uniform = [&gen]() {
                return 2.0 * ((gen() >> 11) * 0x1.0p-53) - 1.0;
            };
            state.u0 = Vector::Zero(n);
            state.v0 = Vector::Zero(n);
            for (int j = 0; j < n; ++j) {
                const double u = uniform(), v = uniform();
                if (model.is_clamped(j)) continue;
                state.u0[j] = spec.random_amplitude * u;
                state.v0[j] = spec.random_amplitude * v;
            }
            return state;
        }
        case InitialSpec::Kind::Explicit: {
            if (static_cast<int>(spec.u0.size()) != n || static_cast<int>(spec.v0.size()) != n)
                throw config_error("initial: explicit u0/v0 must have length n_atoms");
            state.u0 = Eigen::Map<const Vector>(spec.u0.data(), n);
            state.v0 = Eigen::Map<const Vector>(spec.v0.data(), n);
            for (int c : model.clamped_atoms())
                if (state.u0[c] != 0.0 || state.v0[c] != 0.0)
                    throw config_error("initial: clamped entries must be zero");
            return state;
        }
    }
    throw config_error("make_initial: unreachable");
}

/// Picks the enrichment node set: the selected_coarse coarse columns nearest
/// the interface plus the first selected_atomistic identity columns.
inline std::vector<int> select_enrichment_nodes(const BasisSet& basis, const ReductionSpec& spec) {
    if (!spec.selected_nodes.empty()) return spec.selected_nodes;
    std::vector<int> nodes;
    const int iface = basis.interface_index();
    for (int c = std::max(0, iface - spec.selected_coarse); c < iface; ++c) nodes.push_back(c);
    for (int c = iface; c < std::min(basis.size(), iface + spec.selected_atomistic); ++c)
        nodes.push_back(c);
    return nodes;
}

/// A runnable system: either the full model or a reduced one.
struct AssembledSystem {
    bool full = false;
    ReducedSystem reduced;  // valid when !full
};

inline AssembledSystem assemble_system(const LatticeModel& model, const BasisSet& basis,
                                       const ReductionSpec& spec) {
    AssembledSystem sys;
    switch (spec.kind) {
        case ReductionSpec::Kind::Full:
            sys.full = true;
            return sys;
        case ReductionSpec::Kind::Conventional:
            sys.reduced = conventional_galerkin(basis, model, spec.force);
            return sys;
        case ReductionSpec::Kind::Extended: {
            const EnrichedBasis enriched =
                krylov_enrich(basis, model, select_enrichment_nodes(basis, spec), spec.enrich_depth);
            sys.reduced = extended_galerkin(basis, enriched, model, spec.force);
            return sys;
        }
        case ReductionSpec::Kind::Direct: {
            // The moment hierarchy is inherently linear: integrate the pencil.
            const Matrix a = model.linearize();
            const StiffnessFamily family = stiffness_family(basis, a, spec.expansion_depth + 1);
            const Pencil pencil = direct_expansion(family, spec.expansion_depth);
            ReducedSystem rs;
            rs.kind = ReductionKind::DirectExpansion;
            rs.mass = pencil.M;
            rs.stiffness = pencil.K;
            Matrix k = pencil.K;
            rs.force = [k](const Vector& x) -> Vector { return -(k * x); };
            rs.coarse_dim = basis.size();
            rs.enrich_dim = static_cast<int>(pencil.M.rows()) - basis.size();
            // Only the q block reconstructs displacements.
            rs.reconstruction = Matrix::Zero(basis.n_free(), pencil.M.rows());
            rs.reconstruction.leftCols(basis.size()) = basis.phi();
            sys.reduced = rs;
            return sys;
        }
    }
    throw config_error("assemble_system: unreachable");
}

/// Least-squares projection of a full state onto the system's coordinates:
/// u_hat(0) = P u(0) for Galerkin systems. Direct-expansion pencils receive
/// (q, xi0[, xi1]) from their defining formulas.
inline std::pair<Vector, Vector> project_initial(const LatticeModel& model, const BasisSet& basis,
                                                 const AssembledSystem& sys, const Vector& u0_full,
                                                 const Vector& v0_full) {
    const Vector u0 = model.to_free(u0_full);
    const Vector v0 = model.to_free(v0_full);
    if (sys.full) return {u0, v0};
    if (sys.reduced.kind == ReductionKind::DirectExpansion) {
        const Matrix a = model.linearize();
        const ProjectorPair pq = orthogonal_projector(basis);
        Eigen::LLT<Matrix> llt(mass_matrix(basis));
        const int m = basis.size();
        const int dim = static_cast<int>(sys.reduced.mass.rows());
        Vector x0 = Vector::Zero(dim), w0 = Vector::Zero(dim);
        x0.head(m) = llt.solve(basis.phi().transpose() * u0);
        w0.head(m) = llt.solve(basis.phi().transpose() * v0);
        if (dim >= 2 * m) {
            x0.segment(m, m) = basis.phi().transpose() * (a * (pq.Q * u0));
            w0.segment(m, m) = basis.phi().transpose() * (a * (pq.Q * v0));
        }
        if (dim >= 3 * m) {
            x0.segment(2 * m, m) = basis.phi().transpose() * (a * (a * (pq.Q * u0)));
            w0.segment(2 * m, m) = basis.phi().transpose() * (a * (a * (pq.Q * v0)));
        }
        return {x0, w0};
    }
    Eigen::LLT<Matrix> llt(sys.reduced.mass);
    if (llt.info() != Eigen::Success) throw numeric_error("project_initial: singular mass");
    return {llt.solve(sys.reduced.reconstruction.transpose() * u0),
            llt.solve(sys.reduced.reconstruction.transpose() * v0)};
}

// ---------------------------------------------------------------------------
// Reflection experiment

struct ReflectionReport {
    double initial_energy = 0.0;      // wave energy of the initial state
    double final_total_energy = 0.0;  // wave energy at the measured snapshot
    double atomistic_energy = 0.0;    // wave energy right of the interface
    double reflection_fraction = 0.0;
    double transmission_fraction = 0.0;
    double measure_time = 0.0;
    bool unstable = false;
};

struct ReflectionResult {
    ReflectionReport report;
    Trajectory trajectory;
    std::vector<DiagnosticsRow> diagnostics;
};

/// Integrates the configured reduction and measures how much wave energy
/// remains in the atomistic region at the final snapshot. Fractions are
/// normalized by the total wave energy at the measured snapshot, which is an
/// exact partition, so reflection + transmission == 1 for finite states.
/// Energy growth beyond 10x the initial energy flags the run unstable.
inline ReflectionResult run_reflection_experiment(const ExperimentConfig& cfg) {
    const LatticeModel model = make_model(cfg.model);
    const BasisSet basis = make_basis(model, cfg.basis);
    const int split = basis.interface_atom();
    const WavePacket init = make_initial(model, cfg.initial);
    const AssembledSystem sys = assemble_system(model, basis, cfg.reduction);
    auto [x0, w0] = project_initial(model, basis, sys, init.u0, init.v0);

    IntegratorConfig icfg;
    icfg.dt = cfg.dt;
    icfg.n_steps = static_cast<int>(std::llround(cfg.t_final / cfg.dt));
    icfg.record_every = cfg.record_every;

    ReflectionResult result;
    result.trajectory = sys.full ? verlet_integrate(model, x0, w0, icfg)
                                 : verlet_integrate(sys.reduced, x0, w0, icfg);

    const Trajectory& traj = result.trajectory;
    for (int k = 0; k < traj.snapshots(); ++k) {
        const RegionEnergy e =
            region_wave_energy(model, traj.displacement(k), traj.velocity_field(k), split);
        result.diagnostics.push_back({traj.times[k], e.total, e.left, e.right});
    }

    const double e_init = result.diagnostics.front().total;
    result.report.initial_energy = e_init;
    int measure = 0;
    for (int k = 0; k < traj.snapshots(); ++k) {
        const double et = result.diagnostics[k].total;
        if (!std::isfinite(et) || (e_init > 0.0 && et > 10.0 * e_init)) {
            result.report.unstable = true;
            break;
        }
        measure = k;
    }
    const DiagnosticsRow& row = result.diagnostics[measure];
    result.report.measure_time = row.t;
    result.report.final_total_energy = row.total;
    result.report.atomistic_energy = row.right;
    if (row.total > 0.0) {
        result.report.reflection_fraction = row.right / row.total;
        result.report.transmission_fraction = row.left / row.total;
    }
    return result;
}

inline json reflection_report_json(const ReflectionReport& r) {
    json j;
    j["normalization"] = "fractions are wave-energy shares at measure_time";
    j["initial_energy"] = r.initial_energy;
    j["final_total_energy"] = r.final_total_energy;
    j["atomistic_energy"] = r.atomistic_energy;
    j["reflection_fraction"] = r.reflection_fraction;
    j["transmission_fraction"] = r.transmission_fraction;
    j["measure_time"] = r.measure_time;
    j["unstable"] = r.unstable;
    return j;
}

// ---------------------------------------------------------------------------
// Error norms

struct ErrorNorms {
    double linf = 0.0;  // sup_t ||uhat - u||_0
    double l2 = 0.0;    // [int_0^T ||uhat - u||_0^2 dt]^(1/2), trapezoidal
};

namespace detail {

inline Vector interp_displacement(const Trajectory& traj, double t) {
    const auto& ts = traj.times;
    if (t <= ts.front()) return traj.displacement(0);
    if (t >= ts.back()) return traj.displacement(traj.snapshots() - 1);
    int hi = 1;
    while (ts[hi] < t) ++hi;
    const double w = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
    return (1.0 - w) * traj.displacement(hi - 1) + w * traj.displacement(hi);
}

}  // namespace detail

/// Compares reconstructed displacement fields; the reference is resampled
/// onto the trajectory's time grid by linear interpolation.
inline ErrorNorms error_norms(const Trajectory& traj, const Trajectory& reference) {
    if (traj.snapshots() == 0 || reference.snapshots() == 0)
        throw config_error("error_norms: empty trajectory");
    if (traj.displacement(0).size() != reference.displacement(0).size())
        throw config_error("error_norms: dimension mismatch");
    ErrorNorms norms;
    std::vector<double> sq(traj.snapshots());
    for (int k = 0; k < traj.snapshots(); ++k) {
        const Vector diff =
            traj.displacement(k) - detail::interp_displacement(reference, traj.times[k]);
        const double norm = diff.norm();
        norms.linf = std::max(norms.linf, norm);
        sq[k] = norm * norm;
    }
    double acc = 0.0;
    for (int k = 1; k < traj.snapshots(); ++k)
        acc += 0.5 * (sq[k] + sq[k - 1]) * (traj.times[k] - traj.times[k - 1]);
    norms.l2 = std::sqrt(acc);
    return norms;
}

// ---------------------------------------------------------------------------
// Kernel and stability reports

/// Diagonal kernel traces (t, node, Theta_nn) for nodes within the probe
/// window around the interface.
inline std::vector<KernelRow> kernel_report(const ExperimentConfig& cfg) {
    const LatticeModel model = make_model(cfg.model);
    const BasisSet basis = make_basis(model, cfg.basis);
    const Matrix a = model.linearize();
    const KernelSpectrum spec = qaq_spectrum(a, orthogonal_projector(basis), basis);

    std::vector<int> probe;
    for (int c = 0; c < basis.size(); ++c)
        if (std::abs(basis.node(c).atom - basis.interface_atom()) <= cfg.kernel.window)
            probe.push_back(c);
    if (probe.empty()) throw config_error("kernel_report: no nodes in probe window");

    std::vector<KernelRow> rows;
    const int nt = static_cast<int>(std::llround(cfg.kernel.t_max / cfg.kernel.dt));
    for (int it = 0; it <= nt; ++it) {
        const double t = it * cfg.kernel.dt;
        for (int c : probe) rows.push_back({t, c, memory_kernel_diagonal(spec, c, t)});
    }
    return rows;
}

inline json audit_json(const StabilityAudit& audit) {
    json eigs = json::array();
    for (int i = 0; i < audit.eigenvalues.size(); ++i)
        eigs.push_back({{"re", audit.eigenvalues[i].real()}, {"im", audit.eigenvalues[i].imag()}});
    return {{"eigenvalues", eigs}, {"stable", audit.stable}};
}

/// Side-by-side stability audit of the conventional, direct-expansion, and
/// extended-Galerkin pencils for the configured basis.
inline json stability_report(const ExperimentConfig& cfg) {
    const LatticeModel model = make_model(cfg.model);
    const BasisSet basis = make_basis(model, cfg.basis);
    const Matrix a = model.linearize();

    json out;
    {
        const Matrix m = mass_matrix(basis);
        const Matrix k = basis.phi().transpose() * a * basis.phi();
        out["conventional"] = audit_json(stability_audit({m, k, 0, false}));
    }
    {
        const StiffnessFamily family = stiffness_family(basis, a, cfg.reduction.expansion_depth + 1);
        const Pencil pencil = direct_expansion(family, cfg.reduction.expansion_depth);
        json entry = audit_json(stability_audit(pencil));
        entry["closed"] = pencil.closed;
        out["direct"] = entry;
    }
    try {
        const EnrichedBasis enriched = krylov_enrich(
            basis, model, select_enrichment_nodes(basis, cfg.reduction), cfg.reduction.enrich_depth);
        const ReducedSystem ext = extended_galerkin(basis, enriched, model, ForceModel::Linearized);
        out["extended"] = audit_json(stability_audit({ext.mass, *ext.stiffness, 0, false}));
    } catch (const enrichment_empty&) {
        // complete basis: nothing to enrich, the extended system equals the
        // conventional one
        out["extended"] = out["conventional"];
        out["extended"]["note"] = "enrichment empty (basis already complete)";
    }
    return out;
}

}  // namespace cgmd
