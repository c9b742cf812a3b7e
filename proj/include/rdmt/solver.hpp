#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rdmt/mesh.hpp"
#include "rdmt/model.hpp"

namespace rdmt {

/// Discrete state: one concentration array per component, entries
/// nonnegative and finite while the integration is alive.
struct State {
    double time = 0.0;
    std::vector<std::vector<double>> u;  // m x num_cells
};

struct SolverConfig {
    double dt_base = 1e-3;
    double t_end = 10.0;
    double u_max = 1e8;  // blow-up threshold on the discrete sup norm
    double dt_min = 1e-12;
    double linear_tol = 1e-10;
    double clamp_tol = 1e-12;
    int output_stride = 10;  // accepted steps per record
    bool full_records = true;

    void validate() const;
};

enum class EventKind { BlowUp, NegativityClamp, StepReject, Completed };

std::string_view event_kind_name(EventKind kind);

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::Completed;
    std::string payload;  // compact JSON
};

struct Record {
    double time = 0.0;
    std::vector<std::vector<double>> u;                // full mode
    std::vector<std::array<double, 3>> norms;          // light mode: L1, L2, Linf
};

struct Trajectory {
    bool full = true;
    std::size_t num_components = 0;
    std::size_t num_cells = 0;
    std::vector<Record> records;
    std::vector<Event> events;

    bool blew_up() const;
    bool completed() const;
    std::optional<double> blowup_time() const;
    double final_time() const { return records.empty() ? 0.0 : records.back().time; }
};

/// Cell-center evaluation of the model's initial data.
std::vector<std::vector<double>> initial_state(const VectorFieldModel& model, const Mesh& mesh);

/// Finite-volume rates: diffusive exchange over interior faces, boundary
/// inflow area * G_i at the owning cell, plus the interior reaction F_i.
std::vector<std::vector<double>> semidiscrete_rhs(const VectorFieldModel& model,
                                                  const Mesh& mesh,
                                                  const std::vector<std::vector<double>>& u);

struct StepResult {
    bool accepted = false;
    State state;
    std::string reject_reason;  // "negativity", "nan", "linear_solve"
};

/// One IMEX step: backward-Euler diffusion per component, reaction and
/// boundary terms explicit at the old state.
StepResult step_imex(const VectorFieldModel& model, const Mesh& mesh, const State& state,
                     double dt, const SolverConfig& config = {});

/// Time integration with step rejection, dt halving down to dt_min,
/// last-resort negativity clamping, and blow-up termination. Deterministic
/// for a fixed configuration.
Trajectory integrate(const VectorFieldModel& model, const Mesh& mesh,
                     const SolverConfig& config);

/// Same, but starting from explicit per-cell values instead of the model's
/// initial polynomials (used by the exact-solution validation cases).
Trajectory integrate(const VectorFieldModel& model, const Mesh& mesh,
                     const SolverConfig& config,
                     const std::vector<std::vector<double>>& initial);

struct ConvergenceReport {
    std::string case_id;
    std::vector<std::size_t> cells;
    std::vector<double> errors;  // L-infinity at the final time
    std::vector<double> orders;  // log2(errors[k-1] / errors[k])
};

/// Exact-solution (zero-flux heat) and refined-reference (linear decay flux)
/// validation cases; case_id is "neumann_heat_1d" or "robin_linear_1d".
ConvergenceReport verify_convergence(const std::string& case_id);

}  // namespace rdmt
