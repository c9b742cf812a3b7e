#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdmt/lyapunov.hpp"
#include "rdmt/mesh.hpp"
#include "rdmt/model.hpp"
#include "rdmt/solver.hpp"

namespace rdmt {

/// Weighted mass budget along a trajectory. The interior and boundary source
/// rates are evaluated from the exact symbolic combinations sum b_i F_i and
/// sum b_i G_i, so structural cancellations hold identically; time integrals
/// use the trapezoid rule on record times.
struct MassBudgetRow {
    double time = 0.0;
    double total = 0.0;
    double interior_cum = 0.0;
    double boundary_cum = 0.0;
    double residual = 0.0;  // total(t) - total(0) - interior - boundary
};

struct MassBudget {
    std::vector<Rational> weights;
    std::vector<MassBudgetRow> rows;

    double max_abs_residual() const;
};

MassBudget mass_budget(const Trajectory& traj, const Mesh& mesh,
                       const VectorFieldModel& model, const std::vector<Rational>& b);

/// Discrete L^p norms on the domain and boundary per component and record,
/// plus windowed sup aggregates over unit windows (tau, tau+1).
struct NormSeries {
    std::vector<double> p_values;  // requested exponents; infinity allowed
    std::vector<double> times;
    /// omega[comp][p_index][record] and boundary[comp][p_index][record].
    std::vector<std::vector<std::vector<double>>> omega;
    std::vector<std::vector<std::vector<double>>> boundary;
    /// sup_omega[comp][record]; always computed.
    std::vector<std::vector<double>> sup_omega;
    /// windowed_sup[comp][tau] = sup of sup_omega over records in [tau, tau+1].
    std::vector<std::vector<double>> windowed_sup;
};

NormSeries norm_series(const Trajectory& traj, const Mesh& mesh,
                       const std::vector<double>& p_list);

struct DiagnosticsBundle {
    MassBudget budget;
    NormSeries norms;
    std::vector<std::pair<double, double>> lyapunov;  // empty when not requested
    double lyapunov_alpha = 0.0;
    double lyapunov_beta = 0.0;
    bool has_lyapunov = false;
};

DiagnosticsBundle compute_diagnostics(const Trajectory& traj, const Mesh& mesh,
                                      const VectorFieldModel& model,
                                      const std::vector<Rational>& b,
                                      const std::vector<double>& p_list,
                                      const HFunctional* lyapunov = nullptr);

/// diagnostics.csv: time, per-component L1/L2/Linf on the domain and L1 on
/// the boundary, the mass-budget columns, then L(t) when enabled.
void write_diagnostics_csv(std::ostream& os, const Trajectory& traj,
                           const DiagnosticsBundle& bundle);

/// trajectory.csv: one row per (time, component); full mode emits per-cell
/// values, light mode the L1/L2/Linf summary.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// events.jsonl: one {"t", "kind", "payload"} object per line.
void write_events_jsonl(std::ostream& os, const Trajectory& traj);

/// Versioned run summary; deterministic for identical inputs (no wall-clock
/// content).
nlohmann::json summary_json(const Trajectory& traj, const DiagnosticsBundle& bundle,
                            const std::string& model_hash, const nlohmann::json& config,
                            const nlohmann::json& verdicts);

}  // namespace rdmt
