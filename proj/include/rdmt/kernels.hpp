#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rdmt/poly.hpp"

namespace rdmt::kernels {

/// Execution mode for the data-parallel cell kernels. Parallel uses OpenMP
/// over fixed-size blocks; results are identical to Serial bit for bit, and
/// independent of the thread count, because reductions always combine the
/// same per-block partial sums in the same order.
enum class Mode { Serial, Parallel };

void set_mode(Mode mode);
Mode mode();

/// Thread cap for Parallel mode; 0 means the OpenMP default.
void set_threads(int n);

inline constexpr std::size_t kReductionBlock = 1024;

/// Blocked dot product; deterministic across modes and thread counts.
double dot(std::span<const double> a, std::span<const double> b);
/// Blocked sum.
double sum(std::span<const double> a);
double max_value(std::span<const double> a);
double min_value(std::span<const double> a);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y = x + alpha * p
void xpay(std::span<const double> x, double alpha, std::span<const double> p,
          std::span<double> y);

/// Polynomial compiled to flat double-coefficient form for fast repeated
/// evaluation. Term order matches MultiPoly's lexicographic order.
struct CompiledPoly {
    struct Term {
        double coeff = 0.0;
        std::vector<std::uint32_t> exps;
    };
    std::size_t num_vars = 0;
    std::vector<Term> terms;

    static CompiledPoly compile(const MultiPoly& p);
    bool empty() const { return terms.empty(); }
    double eval(std::span<const double> z) const;
};

/// out[k] = poly(u_all[0][k], ..., u_all[m-1][k]) for every cell k.
void eval_poly_over_cells(const CompiledPoly& poly,
                          std::span<const std::vector<double>> components,
                          std::span<double> out);

/// Helmholtz operator y = x - coef * L x for the cell-centered zero-flux
/// Laplacian L on a uniform nx-by-ny grid with spacings dx, dy.
struct Stencil2D {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double inv_dx2 = 0.0;
    double inv_dy2 = 0.0;
};

void helmholtz_apply_2d(const Stencil2D& s, double coef, std::span<const double> x,
                        std::span<double> y);

/// Conjugate gradient for the SPD system (I - coef*L) u = b on the 2D stencil.
/// Returns true on convergence to |r| <= tol * |b|; iteration count capped.
bool cg_solve_2d(const Stencil2D& s, double coef, std::span<const double> b,
                 std::span<double> u, double tol, std::size_t max_iter,
                 std::size_t* iterations = nullptr);

/// Direct tridiagonal elimination for (I - coef*L) u = b on a uniform 1D
/// zero-flux grid with spacing h. Overwrites u; b may alias u.
void thomas_solve_1d(std::size_t n, double h, double coef, std::span<const double> b,
                     std::span<double> u);

}  // namespace rdmt::kernels
