#include "rdmt/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdmt/kernels.hpp"

namespace rdmt {
namespace {

Rational binomial(unsigned n, unsigned k) {
    if (k > n) return Rational(0);
    Rational acc(1);
    for (unsigned j = 0; j < k; ++j) {
        acc = acc * Rational(static_cast<long>(n - j)) / Rational(static_cast<long>(j + 1));
    }
    return acc;
}

Rational multinomial(unsigned n, const MultiPoly::Exponents& e) {
    Rational acc(1);
    unsigned used = 0;
    for (std::uint32_t ek : e) {
        acc = acc * binomial(n - used, ek);
        used += ek;
    }
    return acc;
}

/// Enumerates chains 0 <= p_1 <= ... <= p_{m-1} <= top in lexicographic
/// order and invokes fn on each.
template <typename Fn>
void for_each_chain(std::size_t len, unsigned top, Fn fn) {
    std::vector<unsigned> p(len, 0);
    if (len == 0) {
        fn(p);
        return;
    }
    while (true) {
        fn(p);
        std::size_t k = 0;
        for (; k < len; ++k) {
            const unsigned limit = (k + 1 < len) ? p[k + 1] : top;
            if (p[k] < limit) {
                ++p[k];
                for (std::size_t j = 0; j < k; ++j) p[j] = 0;
                break;
            }
        }
        if (k == len) return;
    }
}

double a_ratio(double di, double dj) { return (di + dj) / (2.0 * std::sqrt(di * dj)); }

/// Cholesky of the diagonally normalized matrix R with R_ii = 1 and
/// R_ij = A_ij / prod_{k=i}^{j-1} theta_k (i < j). Returns the failing pivot
/// row, or nullopt when positive definite.
std::optional<std::size_t> normalized_cholesky_failure(std::size_t m,
                                                       const std::vector<Rational>& theta,
                                                       const std::vector<double>& d,
                                                       double pivot_tol) {
    std::vector<std::vector<double>> r(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        r[i][i] = 1.0;
        double scale = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            scale *= theta[j - 1].to_double();
            r[i][j] = r[j][i] = a_ratio(d[i], d[j]) / scale;
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        double pivot = r[k][k];
        for (std::size_t s = 0; s < k; ++s) pivot -= r[k][s] * r[k][s];
        if (!(pivot > pivot_tol)) return k;
        const double lkk = std::sqrt(pivot);
        r[k][k] = lkk;
        for (std::size_t i = k + 1; i < m; ++i) {
            double v = r[i][k];
            for (std::size_t s = 0; s < k; ++s) v -= r[i][s] * r[k][s];
            r[i][k] = v / lkk;
        }
    }
    return std::nullopt;
}

void validate_inputs(std::size_t m, unsigned p_m, const std::vector<Rational>& theta,
                     const std::vector<double>* d) {
    if (m < 1) throw std::invalid_argument("component count must be at least 1");
    if (p_m < 2) throw std::invalid_argument("functional order must be at least 2");
    if (theta.size() + 1 != m) throw std::invalid_argument("theta must have length m - 1");
    for (const auto& t : theta) {
        if (t.sign() <= 0) throw std::invalid_argument("theta entries must be positive");
    }
    if (d != nullptr) {
        if (d->size() != m) throw std::invalid_argument("diffusion vector must have length m");
        for (double di : *d) {
            if (!(di > 0.0)) throw std::invalid_argument("diffusion constants must be positive");
        }
    }
}

}  // namespace

HFunctional build_h(std::size_t m, unsigned p_m, const std::vector<Rational>& theta) {
    validate_inputs(m, p_m, theta, nullptr);

    HFunctional h;
    h.m = m;
    h.p_m = p_m;
    h.theta = theta;
    h.poly = MultiPoly(m);

    for_each_chain(m - 1, p_m, [&](const std::vector<unsigned>& p) {
        Rational coeff(1);
        unsigned prev = p_m;
        // prod_j C(p_{j+1}, p_j) walking the chain from the top.
        for (std::size_t j = m - 1; j-- > 0;) {
            coeff *= binomial(prev, p[j]);
            prev = p[j];
        }
        for (std::size_t j = 0; j + 1 < m; ++j) {
            coeff *= theta[j].pow(p[j] * p[j]);
        }
        MultiPoly::Exponents e(m);
        unsigned below = 0;
        for (std::size_t j = 0; j + 1 < m; ++j) {
            e[j] = p[j] - below;
            below = p[j];
        }
        e[m - 1] = p_m - below;
        h.poly.add_term(e, coeff);
    });

    bool first = true;
    Rational beta(0);
    for (const auto& [e, c] : h.poly.terms()) {
        beta += c;
        const Rational ratio = c / multinomial(p_m, e);
        if (first || ratio < h.alpha_pm) h.alpha_pm = ratio;
        first = false;
    }
    h.beta_pm = beta;
    return h;
}

std::vector<MultiPoly> h_gradient(const HFunctional& h) {
    std::vector<MultiPoly> grad;
    grad.reserve(h.m);
    for (std::size_t i = 1; i <= h.m; ++i) grad.push_back(h.poly.partial(i));
    return grad;
}

std::vector<DijMatrix> dij_matrices(std::size_t m, unsigned p_m,
                                    const std::vector<Rational>& theta,
                                    const std::vector<double>& d) {
    validate_inputs(m, p_m, theta, &d);

    std::vector<Rational> d_exact;
    d_exact.reserve(m);
    for (double di : d) d_exact.push_back(Rational::from_double(di));

    std::vector<DijMatrix> out;
    const Rational half(1, 2);
    for_each_chain(m - 1, p_m >= 2 ? p_m - 2 : 0, [&](const std::vector<unsigned>& p) {
        DijMatrix mat;
        mat.p = p;
        mat.entries.assign(m, std::vector<Rational>(m, Rational(0)));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                Rational v = (d_exact[i] + d_exact[j]) * half;
                for (std::size_t k = 0; k + 1 < m; ++k) {
                    const unsigned bump =
                        (k >= i ? 1u : 0u) + (k >= j ? 1u : 0u);
                    const unsigned expo = (p[k] + bump) * (p[k] + bump);
                    v *= theta[k].pow(expo);
                }
                mat.entries[i][j] = v;
                mat.entries[j][i] = v;
            }
        }
        out.push_back(std::move(mat));
    });
    return out;
}

ThetaFeasibility theta_feasible(std::size_t m, unsigned p_m,
                                const std::vector<Rational>& theta,
                                const std::vector<double>& d) {
    validate_inputs(m, p_m, theta, &d);
    constexpr double kPivotTol = 1e-13;

    ThetaFeasibility report;
    report.theta = theta;
    if (m == 2) report.threshold_m2 = a_ratio(d[0], d[1]);

    // Every DijMatrix is a symmetric diagonal rescaling of the same
    // normalized matrix, so one Cholesky verdict applies to all of them; the
    // per-index rows keep the reporting contract.
    const auto failure = normalized_cholesky_failure(m, theta, d, kPivotTol);
    const bool pd = !failure.has_value();

    report.feasible = pd;
    for_each_chain(m - 1, p_m >= 2 ? p_m - 2 : 0, [&](const std::vector<unsigned>& p) {
        report.per_index.emplace_back(p, pd);
    });
    return report;
}

std::optional<std::vector<Rational>> find_feasible_theta(std::size_t m, unsigned p_m,
                                                         const std::vector<double>& d,
                                                         std::vector<Rational> start) {
    if (m < 2) return std::vector<Rational>{};
    std::vector<Rational> theta = std::move(start);
    if (theta.empty()) {
        theta.resize(m - 1);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            double worst = 1.0;
            for (std::size_t j = i + 1; j < m; ++j) worst = std::max(worst, a_ratio(d[i], d[j]));
            theta[i] = Rational::from_double(std::nextafter(2.0 * worst, 1e30));
        }
    }
    if (theta.size() + 1 != m) throw std::invalid_argument("theta start has wrong length");

    const Rational cap = Rational(1 << 20);
    for (int iter = 0; iter < 200; ++iter) {
        const auto failure = normalized_cholesky_failure(m, theta, d, 1e-13);
        if (!failure.has_value()) return theta;
        const std::size_t row = *failure;  // row >= 1: the leading pivot is 1
        const std::size_t idx = std::min(row, m - 1) - 1;
        if (theta[idx] < cap) {
            theta[idx] *= Rational(2);
            continue;
        }
        bool bumped = false;
        for (auto& t : theta) {
            if (t < cap) {
                t *= Rational(2);
                bumped = true;
            }
        }
        if (!bumped) return std::nullopt;  // everything at the cap and still indefinite
    }
    return std::nullopt;
}

std::vector<std::pair<double, double>> functional_series(const Trajectory& traj,
                                                         const Mesh& mesh,
                                                         const HFunctional& h) {
    if (!traj.full) {
        throw std::invalid_argument("functional series needs a full-mode trajectory");
    }
    if (traj.num_components != h.m) {
        throw std::invalid_argument("functional component count mismatch");
    }
    const auto poly = kernels::CompiledPoly::compile(h.poly);
    const std::size_t nrec = traj.records.size();
    std::vector<std::pair<double, double>> series(nrec);

    const bool par = kernels::mode() == kernels::Mode::Parallel;
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t ri = 0; ri < static_cast<std::ptrdiff_t>(nrec); ++ri) {
        const auto& rec = traj.records[static_cast<std::size_t>(ri)];
        std::vector<double> point(h.m);
        double acc = 0.0;
        for (std::size_t k = 0; k < traj.num_cells; ++k) {
            for (std::size_t c = 0; c < h.m; ++c) point[c] = rec.u[c][k];
            acc += poly.eval(point);
        }
        series[static_cast<std::size_t>(ri)] = {rec.time, acc * mesh.cell_volume};
    }
    return series;
}

}  // namespace rdmt
