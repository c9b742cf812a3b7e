#include "rdmt/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace rdmt::kernels {
namespace {

std::atomic<Mode> g_mode{Mode::Parallel};

inline bool parallel() { return g_mode.load(std::memory_order_relaxed) == Mode::Parallel; }

inline std::size_t block_count(std::size_t n) {
    return (n + kReductionBlock - 1) / kReductionBlock;
}

template <typename PartialFn, typename CombineFn>
double blocked_reduce(std::size_t n, double init, PartialFn partial, CombineFn combine) {
    const std::size_t nb = block_count(n);
    if (nb == 0) return init;
    std::vector<double> partials(nb);
    const bool par = parallel();
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t ib = 0; ib < static_cast<std::ptrdiff_t>(nb); ++ib) {
        const std::size_t lo = static_cast<std::size_t>(ib) * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        partials[static_cast<std::size_t>(ib)] = partial(lo, hi);
    }
    double acc = init;
    for (double v : partials) acc = combine(acc, v);
    return acc;
}

}  // namespace

void set_mode(Mode mode) { g_mode.store(mode, std::memory_order_relaxed); }

Mode mode() { return g_mode.load(std::memory_order_relaxed); }

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot size mismatch");
    return blocked_reduce(
        a.size(), 0.0,
        [&](std::size_t lo, std::size_t hi) {
            double s = 0.0;
            for (std::size_t k = lo; k < hi; ++k) s += a[k] * b[k];
            return s;
        },
        [](double x, double y) { return x + y; });
}

double sum(std::span<const double> a) {
    return blocked_reduce(
        a.size(), 0.0,
        [&](std::size_t lo, std::size_t hi) {
            double s = 0.0;
            for (std::size_t k = lo; k < hi; ++k) s += a[k];
            return s;
        },
        [](double x, double y) { return x + y; });
}

double max_value(std::span<const double> a) {
    return blocked_reduce(
        a.size(), -std::numeric_limits<double>::infinity(),
        [&](std::size_t lo, std::size_t hi) {
            double s = a[lo];
            for (std::size_t k = lo + 1; k < hi; ++k) s = std::max(s, a[k]);
            return s;
        },
        [](double x, double y) { return std::max(x, y); });
}

double min_value(std::span<const double> a) {
    return blocked_reduce(
        a.size(), std::numeric_limits<double>::infinity(),
        [&](std::size_t lo, std::size_t hi) {
            double s = a[lo];
            for (std::size_t k = lo + 1; k < hi; ++k) s = std::min(s, a[k]);
            return s;
        },
        [](double x, double y) { return std::min(x, y); });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy size mismatch");
    const bool par = parallel();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        y[static_cast<std::size_t>(k)] += alpha * x[static_cast<std::size_t>(k)];
    }
}

void xpay(std::span<const double> x, double alpha, std::span<const double> p,
          std::span<double> y) {
    if (x.size() != p.size() || x.size() != y.size()) {
        throw std::invalid_argument("xpay size mismatch");
    }
    const bool par = parallel();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto i = static_cast<std::size_t>(k);
        y[i] = x[i] + alpha * p[i];
    }
}

CompiledPoly CompiledPoly::compile(const MultiPoly& p) {
    CompiledPoly out;
    out.num_vars = p.num_vars();
    out.terms.reserve(p.term_count());
    for (const auto& [e, c] : p.terms()) {
        out.terms.push_back({c.to_double(), e});
    }
    return out;
}

double CompiledPoly::eval(std::span<const double> z) const {
    double acc = 0.0;
    for (const auto& t : terms) {
        double v = t.coeff;
        for (std::size_t k = 0; k < num_vars; ++k) {
            const double zk = z[k];
            for (std::uint32_t j = 0; j < t.exps[k]; ++j) v *= zk;
        }
        acc += v;
    }
    return acc;
}

void eval_poly_over_cells(const CompiledPoly& poly,
                          std::span<const std::vector<double>> components,
                          std::span<double> out) {
    const std::size_t m = poly.num_vars;
    if (components.size() != m) {
        throw std::invalid_argument("component count mismatch in batch evaluation");
    }
    const bool par = parallel();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t kk = 0; kk < n; ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        double acc = 0.0;
        for (const auto& t : poly.terms) {
            double v = t.coeff;
            for (std::size_t c = 0; c < m; ++c) {
                const double z = components[c][k];
                for (std::uint32_t j = 0; j < t.exps[c]; ++j) v *= z;
            }
            acc += v;
        }
        out[k] = acc;
    }
}

void helmholtz_apply_2d(const Stencil2D& s, double coef, std::span<const double> x,
                        std::span<double> y) {
    const std::size_t nx = s.nx;
    const std::size_t ny = s.ny;
    if (x.size() != nx * ny || y.size() != nx * ny) {
        throw std::invalid_argument("stencil size mismatch");
    }
    const double cx = coef * s.inv_dx2;
    const double cy = coef * s.inv_dy2;
    const bool par = parallel();
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(ny); ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t k = j * nx + i;
            const double c = x[k];
            double lap = 0.0;
            if (i > 0) lap += cx * (x[k - 1] - c);
            if (i + 1 < nx) lap += cx * (x[k + 1] - c);
            if (j > 0) lap += cy * (x[k - nx] - c);
            if (j + 1 < ny) lap += cy * (x[k + nx] - c);
            y[k] = c - lap;
        }
    }
}

bool cg_solve_2d(const Stencil2D& s, double coef, std::span<const double> b,
                 std::span<double> u, double tol, std::size_t max_iter,
                 std::size_t* iterations) {
    const std::size_t n = b.size();
    std::vector<double> r(n), p(n), ap(n);

    std::copy(b.begin(), b.end(), u.begin());
    helmholtz_apply_2d(s, coef, u, ap);
    const bool par = parallel();
#pragma omp parallel for schedule(static) if (par)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
        const auto i = static_cast<std::size_t>(k);
        r[i] = b[i] - ap[i];
    }
    std::copy(r.begin(), r.end(), p.begin());

    const double bb = dot(b, b);
    const double stop = tol * tol * std::max(bb, 1e-300);
    double rr = dot(r, r);
    std::size_t it = 0;
    while (rr > stop && it < max_iter) {
        helmholtz_apply_2d(s, coef, p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;  // operator is SPD; a nonpositive value means breakdown
        const double alpha = rr / pap;
        axpy(alpha, p, u);
        axpy(-alpha, ap, r);
        const double rr_new = dot(r, r);
        xpay(r, rr_new / rr, p, p);
        rr = rr_new;
        ++it;
    }
    if (iterations != nullptr) *iterations = it;
    return rr <= stop && std::isfinite(rr);
}

void thomas_solve_1d(std::size_t n, double h, double coef, std::span<const double> b,
                     std::span<double> u) {
    if (b.size() != n || u.size() != n) throw std::invalid_argument("thomas size mismatch");
    if (n == 1) {
        u[0] = b[0];
        return;
    }
    const double r = coef / (h * h);
    std::vector<double> cp(n), dp(n);

    // Rows: [1+r, -r], interior [-r, 1+2r, -r], [-r, 1+r].
    double beta = 1.0 + r;
    cp[0] = -r / beta;
    dp[0] = b[0] / beta;
    for (std::size_t k = 1; k < n; ++k) {
        const double diag = (k + 1 == n) ? 1.0 + r : 1.0 + 2.0 * r;
        beta = diag + r * cp[k - 1];
        cp[k] = -r / beta;
        dp[k] = (b[k] + r * dp[k - 1]) / beta;
    }
    u[n - 1] = dp[n - 1];
    for (std::size_t k = n - 1; k-- > 0;) {
        u[k] = dp[k] - cp[k] * u[k + 1];
    }
}

}  // namespace rdmt::kernels
