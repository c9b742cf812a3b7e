#include "rdmt/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "rdmt/kernels.hpp"

namespace rdmt {
namespace {

using kernels::CompiledPoly;

std::array<double, 3> component_norms(const std::vector<double>& u, double cell_volume) {
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
    for (double v : u) {
        const double a = std::abs(v);
        l1 += a;
        l2 += v * v;
        linf = std::max(linf, a);
    }
    return {l1 * cell_volume, std::sqrt(l2 * cell_volume), linf};
}

Record make_record(double time, const std::vector<std::vector<double>>& u, bool full,
                   double cell_volume) {
    Record r;
    r.time = time;
    if (full) {
        r.u = u;
    } else {
        r.norms.reserve(u.size());
        for (const auto& comp : u) r.norms.push_back(component_norms(comp, cell_volume));
    }
    return r;
}

std::string payload_json(std::initializer_list<std::pair<const char*, nlohmann::json>> kv) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : kv) j[k] = v;
    return j.dump();
}

/// Precompiled step machinery reused across the whole integration.
class ImexStepper {
public:
    ImexStepper(const VectorFieldModel& model, const Mesh& mesh, const SolverConfig& config)
        : model_(model), mesh_(mesh), config_(config) {
        const std::size_t n = mesh.num_cells();
        for (std::size_t i = 0; i < model.m; ++i) {
            f_.push_back(CompiledPoly::compile(model.fields_f[i]));
            g_.push_back(CompiledPoly::compile(model.fields_g[i]));
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (mesh.boundary_area_per_cell[k] != 0.0) boundary_cells_.push_back(k);
        }
        scratch_.resize(n);
        rhs_.resize(n);
        point_.resize(model.m);
        if (mesh.dim == 2) {
            stencil_ = {mesh.cells[0], mesh.cells[1],
                        1.0 / (mesh.spacing[0] * mesh.spacing[0]),
                        1.0 / (mesh.spacing[1] * mesh.spacing[1])};
        }
    }

    enum class Status { Ok, Negativity, NotFinite, LinearSolve };

    Status try_step(const std::vector<std::vector<double>>& u, double dt,
                    std::vector<std::vector<double>>& out, bool clamp_negativity,
                    std::size_t* clamp_count) {
        const std::size_t n = mesh_.num_cells();
        const std::size_t m = model_.m;
        if (out.size() != m) out.assign(m, std::vector<double>(n));
        if (clamp_count != nullptr) *clamp_count = 0;

        for (std::size_t i = 0; i < m; ++i) {
            std::copy(u[i].begin(), u[i].end(), rhs_.begin());
            if (!f_[i].empty()) {
                kernels::eval_poly_over_cells(f_[i], u, scratch_);
                kernels::axpy(dt, scratch_, rhs_);
            }
            if (!g_[i].empty() && !boundary_cells_.empty()) {
                for (const std::size_t k : boundary_cells_) {
                    for (std::size_t c = 0; c < m; ++c) point_[c] = u[c][k];
                    const double scale = mesh_.boundary_area_per_cell[k] / mesh_.cell_volume;
                    rhs_[k] += dt * scale * g_[i].eval(point_);
                }
            }

            auto& ui = out[i];
            ui.resize(n);
            const double coef = dt * model_.d[i];
            if (mesh_.dim == 1) {
                kernels::thomas_solve_1d(n, mesh_.spacing[0], coef, rhs_, ui);
            } else {
                const std::size_t cap = std::min<std::size_t>(
                    n, std::max<std::size_t>(200, 4 * (mesh_.cells[0] + mesh_.cells[1])));
                if (!kernels::cg_solve_2d(stencil_, coef, rhs_, ui, config_.linear_tol, cap)) {
                    return Status::LinearSolve;
                }
            }

            for (double v : ui) {
                if (!std::isfinite(v)) return Status::NotFinite;
            }
            if (clamp_negativity) {
                for (double& v : ui) {
                    if (v < 0.0) {
                        v = 0.0;
                        if (clamp_count != nullptr) ++(*clamp_count);
                    }
                }
            } else {
                for (double v : ui) {
                    if (v < -config_.clamp_tol) return Status::Negativity;
                }
                for (double& v : ui) {
                    if (v < 0.0) v = 0.0;  // within clamp_tol of zero: roundoff hygiene
                }
            }
        }
        return Status::Ok;
    }

private:
    const VectorFieldModel& model_;
    const Mesh& mesh_;
    const SolverConfig& config_;
    std::vector<CompiledPoly> f_, g_;
    std::vector<std::size_t> boundary_cells_;
    std::vector<double> scratch_, rhs_, point_;
    kernels::Stencil2D stencil_;
};

double state_max(const std::vector<std::vector<double>>& u) {
    double mx = -std::numeric_limits<double>::infinity();
    for (const auto& comp : u) mx = std::max(mx, kernels::max_value(comp));
    return mx;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(dt_base > 0.0)) throw std::invalid_argument("dt_base must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be positive");
    if (!(dt_min > 0.0) || dt_min >= dt_base) {
        throw std::invalid_argument("dt_min must satisfy 0 < dt_min < dt_base");
    }
    if (!(u_max > 0.0)) throw std::invalid_argument("u_max must be positive");
    if (output_stride < 1) throw std::invalid_argument("output_stride must be >= 1");
}

std::string_view event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::BlowUp: return "BlowUp";
        case EventKind::NegativityClamp: return "NegativityClamp";
        case EventKind::StepReject: return "StepReject";
        case EventKind::Completed: return "Completed";
    }
    return "Unknown";
}

bool Trajectory::blew_up() const {
    return std::any_of(events.begin(), events.end(),
                       [](const Event& e) { return e.kind == EventKind::BlowUp; });
}

bool Trajectory::completed() const {
    return std::any_of(events.begin(), events.end(),
                       [](const Event& e) { return e.kind == EventKind::Completed; });
}

std::optional<double> Trajectory::blowup_time() const {
    for (const auto& e : events) {
        if (e.kind == EventKind::BlowUp) return e.time;
    }
    return std::nullopt;
}

std::vector<std::vector<double>> initial_state(const VectorFieldModel& model, const Mesh& mesh) {
    model.validate();
    if (model.initial.size() != model.m) {
        throw std::invalid_argument("model has no initial data");
    }
    const std::size_t n = mesh.num_cells();
    std::vector<std::vector<double>> u(model.m, std::vector<double>(n));
    for (std::size_t i = 0; i < model.m; ++i) {
        if (model.initial[i].num_vars() != static_cast<std::size_t>(mesh.dim)) {
            throw std::invalid_argument("initial data dimension does not match the mesh");
        }
        const auto poly = CompiledPoly::compile(model.initial[i]);
        for (std::size_t k = 0; k < n; ++k) {
            const auto c = mesh.cell_center(k);
            u[i][k] = poly.eval(std::span<const double>(c.data(),
                                                        static_cast<std::size_t>(mesh.dim)));
        }
    }
    return u;
}

std::vector<std::vector<double>> semidiscrete_rhs(const VectorFieldModel& model,
                                                  const Mesh& mesh,
                                                  const std::vector<std::vector<double>>& u) {
    model.validate();
    const std::size_t n = mesh.num_cells();
    if (u.size() != model.m) throw std::invalid_argument("state component count mismatch");
    for (const auto& comp : u) {
        if (comp.size() != n) throw std::invalid_argument("state cell count mismatch");
    }

    std::vector<std::vector<double>> rate(model.m, std::vector<double>(n, 0.0));
    const double inv_v = 1.0 / mesh.cell_volume;
    for (std::size_t i = 0; i < model.m; ++i) {
        const double di = model.d[i];
        for (const auto& f : mesh.interior_faces) {
            const double flux =
                di * (u[i][f.cell_b] - u[i][f.cell_a]) / f.center_distance * f.area;
            rate[i][f.cell_a] += flux * inv_v;
            rate[i][f.cell_b] -= flux * inv_v;
        }
    }

    std::vector<double> point(model.m);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < model.m; ++i) point[i] = u[i][k];
        const double bscale = mesh.boundary_area_per_cell[k] * inv_v;
        for (std::size_t i = 0; i < model.m; ++i) {
            rate[i][k] += model.fields_f[i].eval(point);
            if (bscale != 0.0) rate[i][k] += bscale * model.fields_g[i].eval(point);
        }
    }
    return rate;
}

StepResult step_imex(const VectorFieldModel& model, const Mesh& mesh, const State& state,
                     double dt, const SolverConfig& config) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    model.validate();
    ImexStepper stepper(model, mesh, config);
    StepResult result;
    const auto status = stepper.try_step(state.u, dt, result.state.u, false, nullptr);
    switch (status) {
        case ImexStepper::Status::Ok:
            result.accepted = true;
            result.state.time = state.time + dt;
            break;
        case ImexStepper::Status::Negativity:
            result.reject_reason = "negativity";
            break;
        case ImexStepper::Status::NotFinite:
            result.reject_reason = "nan";
            break;
        case ImexStepper::Status::LinearSolve:
            result.reject_reason = "linear_solve";
            break;
    }
    return result;
}

Trajectory integrate(const VectorFieldModel& model, const Mesh& mesh,
                     const SolverConfig& config) {
    return integrate(model, mesh, config, initial_state(model, mesh));
}

Trajectory integrate(const VectorFieldModel& model, const Mesh& mesh,
                     const SolverConfig& config,
                     const std::vector<std::vector<double>>& initial) {
    model.validate();
    config.validate();
    const std::size_t n = mesh.num_cells();
    if (initial.size() != model.m) {
        throw std::invalid_argument("initial component count mismatch");
    }
    for (const auto& comp : initial) {
        if (comp.size() != n) throw std::invalid_argument("initial cell count mismatch");
    }

    Trajectory traj;
    traj.full = config.full_records;
    traj.num_components = model.m;
    traj.num_cells = n;

    ImexStepper stepper(model, mesh, config);
    std::vector<std::vector<double>> u = initial;
    std::vector<std::vector<double>> candidate(model.m, std::vector<double>(n));
    double t = 0.0;
    traj.records.push_back(make_record(t, u, traj.full, mesh.cell_volume));

    if (state_max(u) >= config.u_max) {
        traj.events.push_back({t, EventKind::BlowUp, payload_json({{"max", state_max(u)}})});
        return traj;
    }

    double current_dt = config.dt_base;
    int accepted_streak = 0;
    long accepted_steps = 0;
    const double t_guard = config.t_end * (1.0 - 1e-14);

    while (t < t_guard) {
        const double dt = std::min(current_dt, config.t_end - t);
        auto status = stepper.try_step(u, dt, candidate, false, nullptr);
        bool clamped_accept = false;
        std::size_t clamp_count = 0;

        if (status != ImexStepper::Status::Ok) {
            const char* reason = status == ImexStepper::Status::Negativity ? "negativity"
                                 : status == ImexStepper::Status::NotFinite ? "nan"
                                                                            : "linear_solve";
            traj.events.push_back(
                {t, EventKind::StepReject, payload_json({{"dt", dt}, {"reason", reason}})});
            accepted_streak = 0;
            if (current_dt > config.dt_min) {
                current_dt = std::max(current_dt * 0.5, config.dt_min);
                continue;
            }
            // At the floor: clamp negatives and keep going; anything else is fatal.
            const auto st2 = stepper.try_step(u, dt, candidate, true, &clamp_count);
            if (st2 != ImexStepper::Status::Ok) {
                throw std::runtime_error("integration failed at dt_min: step not finite");
            }
            clamped_accept = true;
        }

        t += dt;
        std::swap(u, candidate);
        ++accepted_steps;
        ++accepted_streak;
        if (clamped_accept) {
            traj.events.push_back({t, EventKind::NegativityClamp,
                                   payload_json({{"cells", clamp_count}, {"dt", dt}})});
        }
        if (current_dt < config.dt_base && accepted_streak >= 10) {
            current_dt = config.dt_base;
            accepted_streak = 0;
        }

        const double mx = state_max(u);
        const bool blowup = mx >= config.u_max;
        const bool final_step = t >= t_guard;
        if (blowup || final_step || accepted_steps % config.output_stride == 0) {
            if (traj.records.back().time < t) {
                traj.records.push_back(make_record(t, u, traj.full, mesh.cell_volume));
            }
        }
        if (blowup) {
            traj.events.push_back({t, EventKind::BlowUp, payload_json({{"max", mx}})});
            return traj;
        }
    }

    traj.events.push_back({t, EventKind::Completed, payload_json({{"steps", accepted_steps}})});
    return traj;
}

ConvergenceReport verify_convergence(const std::string& case_id) {
    const std::vector<std::size_t> grids{25, 50, 100, 200};
    constexpr double t_final = 0.1;
    constexpr double length = 1.0;
    const double pi = std::acos(-1.0);

    ConvergenceReport report;
    report.case_id = case_id;
    report.cells = grids;

    VectorFieldModel model;
    model.m = 1;
    model.d = {1.0};
    model.fields_f = {MultiPoly(1)};

    if (case_id == "neumann_heat_1d") {
        model.fields_g = {MultiPoly(1)};
    } else if (case_id == "robin_linear_1d") {
        MultiPoly g(1);
        g.add_term({1}, Rational(-1));  // linear decay flux G(u) = -u
        model.fields_g = {g};
    } else {
        throw std::invalid_argument("unknown convergence case: " + case_id);
    }

    const auto init_values = [&](const Mesh& mesh) {
        std::vector<double> w(mesh.num_cells());
        for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
            w[k] = 1.0 + std::cos(pi * mesh.cell_center(k)[0] / length);
        }
        return w;
    };

    const auto run_case = [&](std::size_t n, double dt) {
        const Mesh mesh = build_interval(length, n);
        SolverConfig config;
        config.dt_base = dt;
        config.dt_min = dt * 1e-6;
        config.t_end = t_final;
        config.output_stride = 1 << 30;  // initial and final records only
        config.full_records = true;
        return integrate(model, mesh, config, {init_values(mesh)});
    };

    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
        const std::size_t n = grids[gi];
        const double h = length / static_cast<double>(n);
        const double dt = h * h;
        const Trajectory traj = run_case(n, dt);
        const auto& u = traj.records.back().u[0];

        double err = 0.0;
        if (case_id == "neumann_heat_1d") {
            const double decay = std::exp(-model.d[0] * pi * pi * t_final / (length * length));
            const Mesh mesh = build_interval(length, n);
            for (std::size_t k = 0; k < n; ++k) {
                const double exact =
                    1.0 + std::cos(pi * mesh.cell_center(k)[0] / length) * decay;
                err = std::max(err, std::abs(u[k] - exact));
            }
        } else {
            const Trajectory ref = run_case(4 * n, dt / 16.0);
            const auto& ur = ref.records.back().u[0];
            for (std::size_t k = 0; k < n; ++k) {
                const double avg =
                    0.25 * (ur[4 * k] + ur[4 * k + 1] + ur[4 * k + 2] + ur[4 * k + 3]);
                err = std::max(err, std::abs(u[k] - avg));
            }
        }
        report.errors.push_back(err);
        if (gi > 0) {
            report.orders.push_back(std::log2(report.errors[gi - 1] / report.errors[gi]));
        }
    }
    return report;
}

}  // namespace rdmt
