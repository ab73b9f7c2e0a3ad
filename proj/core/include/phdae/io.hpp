#pragma once

#include <optional>
#include <string>

#include "phdae/index.hpp"
#include "phdae/sim.hpp"
#include "phdae/system.hpp"

namespace phdae {

/// On-disk description of a system: dimensions, interval, the nine named
/// coefficients as lists of row-major coefficient matrices (polynomial in t),
/// optionally an initial state and an input specification. Every coefficient
/// must be present; zero matrices are written out explicitly.
struct SystemDocument {
  PHDAESystem system;
  std::optional<Vector> initial_state;
  std::optional<InputSignal> input;
};

SystemDocument parse_system_document(const std::string& text);
SystemDocument load_system_document(const std::string& path);

/// Canonical serialization: fixed key order, 17-significant-digit floats.
/// parse -> write -> parse round-trips bit-identically.
std::string write_system_document(const SystemDocument& doc);
void save_system_document(const SystemDocument& doc, const std::string& path);

/// Machine-readable report emitted beside the human-readable table.
struct ReportDocument {
  std::string tool = "phdae";
  std::string version;
  double tol = 0.0;
  Index grid_points = 0;
  std::optional<StructureReport> structure;
  std::optional<IndexData> index;          ///< with-input analysis
  std::optional<IndexData> index_zero_input;
  struct Reduction {
    Index n1 = 0, n2 = 0, pinned = 0;
    double structural_zero_residual = 0.0;
    double q_offdiag_residual = 0.0;
    double cond_U = 1.0, cond_V = 1.0;
    Matrix x2_from_x1, x2_from_u;  ///< algebraic-block recovery maps at t0
    double consistency_residual_t0 = -1.0;  ///< -1 when no initial state was given
  };
  std::optional<Reduction> reduction;
  std::optional<EnergyReport> energy;
};

std::string write_report_document(const ReportDocument& rep);
void save_report_document(const ReportDocument& rep, const std::string& path);

/// Trajectory CSV with header t, x1..xn, y1..ym, u1..um, H.
std::string write_trajectory_csv(const Trajectory& traj, Index n, Index m);
void save_trajectory_csv(const Trajectory& traj, Index n, Index m,
                         const std::string& path);

std::string tool_version();

}  // namespace phdae
