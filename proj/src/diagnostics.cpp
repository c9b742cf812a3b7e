#include "rdmt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "rdmt/kernels.hpp"

namespace rdmt {
namespace {

const char* fmt_full() { return "%.16e"; }

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), fmt_full(), v);
    return buf;
}

void require_full(const Trajectory& traj) {
    if (!traj.full) {
        throw std::invalid_argument("diagnostics need a full-mode trajectory");
    }
}

double pnorm_cells(const std::vector<double>& u, double weight, double p) {
    if (std::isinf(p)) {
        double mx = 0.0;
        for (double v : u) mx = std::max(mx, std::abs(v));
        return mx;
    }
    double acc = 0.0;
    for (double v : u) acc += std::pow(std::abs(v), p);
    return std::pow(weight * acc, 1.0 / p);
}

}  // namespace

double MassBudget::max_abs_residual() const {
    double mx = 0.0;
    for (const auto& r : rows) mx = std::max(mx, std::abs(r.residual));
    return mx;
}

MassBudget mass_budget(const Trajectory& traj, const Mesh& mesh,
                       const VectorFieldModel& model, const std::vector<Rational>& b) {
    require_full(traj);
    if (b.size() != model.m) throw std::invalid_argument("weight count mismatch");
    for (const auto& w : b) {
        if (w.sign() <= 0) throw std::invalid_argument("mass weights must be positive");
    }
    if (traj.num_components != model.m) {
        throw std::invalid_argument("trajectory component count mismatch");
    }

    const MultiPoly comb_f = linear_combination(b, model.fields_f);
    const MultiPoly comb_g = linear_combination(b, model.fields_g);
    const auto cf = kernels::CompiledPoly::compile(comb_f);
    const auto cg = kernels::CompiledPoly::compile(comb_g);
    std::vector<double> bw(model.m);
    for (std::size_t i = 0; i < model.m; ++i) bw[i] = b[i].to_double();

    MassBudget budget;
    budget.weights = b;
    budget.rows.resize(traj.records.size());

    std::vector<double> interior_rate(traj.records.size(), 0.0);
    std::vector<double> boundary_rate(traj.records.size(), 0.0);
    std::vector<double> point(model.m);

    for (std::size_t r = 0; r < traj.records.size(); ++r) {
        const auto& rec = traj.records[r];
        double total = 0.0;
        for (std::size_t i = 0; i < model.m; ++i) {
            total += bw[i] * kernels::sum(rec.u[i]);
        }
        budget.rows[r].time = rec.time;
        budget.rows[r].total = total * mesh.cell_volume;

        if (!cf.empty()) {
            double acc = 0.0;
            for (std::size_t k = 0; k < traj.num_cells; ++k) {
                for (std::size_t i = 0; i < model.m; ++i) point[i] = rec.u[i][k];
                acc += cf.eval(point);
            }
            interior_rate[r] = acc * mesh.cell_volume;
        }
        if (!cg.empty()) {
            double acc = 0.0;
            for (const auto& face : mesh.boundary_faces) {
                for (std::size_t i = 0; i < model.m; ++i) point[i] = rec.u[i][face.cell];
                acc += face.area * cg.eval(point);
            }
            boundary_rate[r] = acc;
        }
    }

    double interior_cum = 0.0;
    double boundary_cum = 0.0;
    for (std::size_t r = 0; r < budget.rows.size(); ++r) {
        if (r > 0) {
            const double dt = budget.rows[r].time - budget.rows[r - 1].time;
            interior_cum += 0.5 * dt * (interior_rate[r - 1] + interior_rate[r]);
            boundary_cum += 0.5 * dt * (boundary_rate[r - 1] + boundary_rate[r]);
        }
        budget.rows[r].interior_cum = interior_cum;
        budget.rows[r].boundary_cum = boundary_cum;
        budget.rows[r].residual =
            budget.rows[r].total - budget.rows[0].total - interior_cum - boundary_cum;
    }
    return budget;
}

NormSeries norm_series(const Trajectory& traj, const Mesh& mesh,
                       const std::vector<double>& p_list) {
    require_full(traj);
    if (p_list.empty()) throw std::invalid_argument("empty norm exponent list");
    for (double p : p_list) {
        if (!(p >= 1.0)) throw std::invalid_argument("norm exponents must be >= 1");
    }

    const std::size_t m = traj.num_components;
    const std::size_t nrec = traj.records.size();

    NormSeries out;
    out.p_values = p_list;
    out.times.reserve(nrec);
    for (const auto& rec : traj.records) out.times.push_back(rec.time);
    out.omega.assign(m, std::vector<std::vector<double>>(p_list.size(),
                                                         std::vector<double>(nrec, 0.0)));
    out.boundary.assign(m, std::vector<std::vector<double>>(p_list.size(),
                                                            std::vector<double>(nrec, 0.0)));
    out.sup_omega.assign(m, std::vector<double>(nrec, 0.0));

    for (std::size_t r = 0; r < nrec; ++r) {
        const auto& rec = traj.records[r];
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
                out.omega[i][pi][r] = pnorm_cells(rec.u[i], mesh.cell_volume, p_list[pi]);
                const double p = p_list[pi];
                if (std::isinf(p)) {
                    double mx = 0.0;
                    for (const auto& face : mesh.boundary_faces) {
                        mx = std::max(mx, std::abs(rec.u[i][face.cell]));
                    }
                    out.boundary[i][pi][r] = mx;
                } else {
                    double acc = 0.0;
                    for (const auto& face : mesh.boundary_faces) {
                        acc += face.area * std::pow(std::abs(rec.u[i][face.cell]), p);
                    }
                    out.boundary[i][pi][r] = std::pow(acc, 1.0 / p);
                }
            }
            out.sup_omega[i][r] =
                pnorm_cells(rec.u[i], mesh.cell_volume, std::numeric_limits<double>::infinity());
        }
    }

    const double t_final = out.times.empty() ? 0.0 : out.times.back();
    const std::size_t windows = t_final >= 1.0 ? static_cast<std::size_t>(t_final) : 0;
    out.windowed_sup.assign(m, std::vector<double>(windows, 0.0));
    for (std::size_t tau = 0; tau < windows; ++tau) {
        const double lo = static_cast<double>(tau);
        const double hi = lo + 1.0;
        for (std::size_t r = 0; r < nrec; ++r) {
            if (out.times[r] < lo || out.times[r] > hi) continue;
            for (std::size_t i = 0; i < m; ++i) {
                out.windowed_sup[i][tau] = std::max(out.windowed_sup[i][tau], out.sup_omega[i][r]);
            }
        }
    }
    return out;
}

DiagnosticsBundle compute_diagnostics(const Trajectory& traj, const Mesh& mesh,
                                      const VectorFieldModel& model,
                                      const std::vector<Rational>& b,
                                      const std::vector<double>& p_list,
                                      const HFunctional* lyapunov) {
    DiagnosticsBundle bundle;
    bundle.budget = mass_budget(traj, mesh, model, b);
    bundle.norms = norm_series(traj, mesh, p_list);
    if (lyapunov != nullptr) {
        bundle.lyapunov = functional_series(traj, mesh, *lyapunov);
        bundle.lyapunov_alpha = lyapunov->alpha_pm.to_double();
        bundle.lyapunov_beta = lyapunov->beta_pm.to_double();
        bundle.has_lyapunov = true;
    }
    return bundle;
}

void write_diagnostics_csv(std::ostream& os, const Trajectory& traj,
                           const DiagnosticsBundle& bundle) {
    const std::size_t m = traj.num_components;
    os << "time";
    for (std::size_t i = 1; i <= m; ++i) {
        os << ",u" << i << "_L1_omega,u" << i << "_L2_omega,u" << i << "_Linf_omega,u" << i
           << "_L1_M";
    }
    os << ",mass_total,mass_interior_cum,mass_boundary_cum,mass_residual";
    if (bundle.has_lyapunov) os << ",L,alpha_pm,beta_pm";
    os << "\n";

    // Find the L1 and L2 slots in the requested exponent list.
    const auto slot = [&](double p) -> std::ptrdiff_t {
        for (std::size_t k = 0; k < bundle.norms.p_values.size(); ++k) {
            if (bundle.norms.p_values[k] == p) return static_cast<std::ptrdiff_t>(k);
        }
        return -1;
    };
    const std::ptrdiff_t s1 = slot(1.0);
    const std::ptrdiff_t s2 = slot(2.0);

    for (std::size_t r = 0; r < bundle.norms.times.size(); ++r) {
        os << num(bundle.norms.times[r]);
        for (std::size_t i = 0; i < m; ++i) {
            const double l1 = s1 >= 0 ? bundle.norms.omega[i][static_cast<std::size_t>(s1)][r]
                                      : 0.0;
            const double l2 = s2 >= 0 ? bundle.norms.omega[i][static_cast<std::size_t>(s2)][r]
                                      : 0.0;
            const double l1m = s1 >= 0
                                   ? bundle.norms.boundary[i][static_cast<std::size_t>(s1)][r]
                                   : 0.0;
            os << "," << num(l1) << "," << num(l2) << "," << num(bundle.norms.sup_omega[i][r])
               << "," << num(l1m);
        }
        const auto& row = bundle.budget.rows[r];
        os << "," << num(row.total) << "," << num(row.interior_cum) << ","
           << num(row.boundary_cum) << "," << num(row.residual);
        if (bundle.has_lyapunov) {
            os << "," << num(bundle.lyapunov[r].second) << "," << num(bundle.lyapunov_alpha)
               << "," << num(bundle.lyapunov_beta);
        }
        os << "\n";
    }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    if (traj.full) {
        os << "time,component";
        for (std::size_t k = 0; k < traj.num_cells; ++k) os << ",c" << k;
        os << "\n";
        for (const auto& rec : traj.records) {
            for (std::size_t i = 0; i < traj.num_components; ++i) {
                os << num(rec.time) << "," << (i + 1);
                for (double v : rec.u[i]) os << "," << num(v);
                os << "\n";
            }
        }
    } else {
        os << "time,component,L1,L2,Linf\n";
        for (const auto& rec : traj.records) {
            for (std::size_t i = 0; i < traj.num_components; ++i) {
                os << num(rec.time) << "," << (i + 1) << "," << num(rec.norms[i][0]) << ","
                   << num(rec.norms[i][1]) << "," << num(rec.norms[i][2]) << "\n";
            }
        }
    }
}

void write_events_jsonl(std::ostream& os, const Trajectory& traj) {
    for (const auto& e : traj.events) {
        nlohmann::json j;
        j["t"] = e.time;
        j["kind"] = std::string(event_kind_name(e.kind));
        j["payload"] = e.payload.empty() ? nlohmann::json::object()
                                         : nlohmann::json::parse(e.payload);
        os << j.dump() << "\n";
    }
}

nlohmann::json summary_json(const Trajectory& traj, const DiagnosticsBundle& bundle,
                            const std::string& model_hash, const nlohmann::json& config,
                            const nlohmann::json& verdicts) {
    nlohmann::json j;
    j["schema"] = 1;
    j["model_hash"] = model_hash;
    j["config"] = config;
    j["verdicts"] = verdicts;

    j["outcome"] = traj.blew_up() ? "BlowUp" : (traj.completed() ? "Completed" : "Partial");
    j["t_final"] = traj.final_time();
    if (const auto bt = traj.blowup_time(); bt.has_value()) j["blowup_time"] = *bt;

    nlohmann::json counts = nlohmann::json::object();
    for (const auto& e : traj.events) {
        const std::string k(event_kind_name(e.kind));
        counts[k] = counts.value(k, 0) + 1;
    }
    j["event_counts"] = counts;
    j["records"] = traj.records.size();

    nlohmann::json max_norms = nlohmann::json::object();
    for (std::size_t i = 0; i < traj.num_components; ++i) {
        double mx = 0.0;
        for (double v : bundle.norms.sup_omega[i]) mx = std::max(mx, v);
        max_norms["max_u" + std::to_string(i + 1)] = mx;
    }
    j["max_norms"] = max_norms;
    if (!bundle.budget.rows.empty()) {
        j["final_mass"] = bundle.budget.rows.back().total;
        j["max_mass_residual"] = bundle.budget.max_abs_residual();
    }
    if (bundle.has_lyapunov) {
        double mx = 0.0;
        for (const auto& [t, v] : bundle.lyapunov) {
            (void)t;
            mx = std::max(mx, v);
        }
        j["max_lyapunov"] = mx;
    }
    return j;
}

}  // namespace rdmt
