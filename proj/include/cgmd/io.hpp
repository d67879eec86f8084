// CSV and JSON output helpers. All numbers are written with 17 significant
// digits so reruns of the same config are byte-identical.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cgmd/dynamics.hpp"
#include "cgmd/errors.hpp"

namespace cgmd {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file: " + path.string());
    return out;
}

/// Snapshot rows (t, atom index, displacement, velocity) over all atoms.
inline void write_trajectory_csv(const std::filesystem::path& path, const LatticeModel& model,
                                 const Trajectory& traj) {
    auto out = open_output(path);
    out << "t,index,displacement,velocity\n";
    for (int k = 0; k < traj.snapshots(); ++k) {
        const Vector u = model.to_full(traj.displacement(k));
        const Vector v = model.to_full(traj.velocity_field(k));
        for (int j = 0; j < model.n_atoms(); ++j)
            out << fmt17(traj.times[k]) << ',' << j << ',' << fmt17(u[j]) << ',' << fmt17(v[j])
                << '\n';
    }
}

struct DiagnosticsRow {
    double t;
    double total;
    double left;
    double right;
};

inline void write_diagnostics_csv(const std::filesystem::path& path,
                                  const std::vector<DiagnosticsRow>& rows) {
    auto out = open_output(path);
    out << "t,E_total,E_left,E_right\n";
    for (const auto& r : rows)
        out << fmt17(r.t) << ',' << fmt17(r.total) << ',' << fmt17(r.left) << ','
            << fmt17(r.right) << '\n';
}

struct KernelRow {
    double t;
    int node;
    double theta;
};

inline void write_kernel_csv(const std::filesystem::path& path, const std::vector<KernelRow>& rows) {
    auto out = open_output(path);
    out << "t,node,theta_nn\n";
    for (const auto& r : rows)
        out << fmt17(r.t) << ',' << r.node << ',' << fmt17(r.theta) << '\n';
}

inline void write_stress_csv(const std::filesystem::path& path, const Vector& sigma) {
    auto out = open_output(path);
    out << "atom_index,sigma\n";
    for (int j = 0; j < sigma.size(); ++j) out << j << ',' << fmt17(sigma[j]) << '\n';
}

}  // namespace cgmd
