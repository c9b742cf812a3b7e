#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rdmt/mesh.hpp"
#include "rdmt/poly.hpp"
#include "rdmt/solver.hpp"

namespace rdmt {

/// Homogeneous Lyapunov polynomial of order p_m with weight vector theta:
/// the chain sum over 0 <= p_1 <= ... <= p_{m-1} <= p_m of
/// prod_j C(p_{j+1}, p_j) * prod_j theta_j^{p_j^2} * u_1^{p_1} u_2^{p_2-p_1} ...
/// All coefficients are strictly positive, so alpha * (sum z)^p <= H(z) <=
/// beta * (sum z)^p on the orthant with the stored equivalence constants.
struct HFunctional {
    std::size_t m = 0;
    unsigned p_m = 2;
    std::vector<Rational> theta;  // length m - 1, strictly positive
    MultiPoly poly{1};
    Rational alpha_pm;  // min coefficient / multinomial ratio
    Rational beta_pm;   // sum of coefficients
};

HFunctional build_h(std::size_t m, unsigned p_m, const std::vector<Rational>& theta);

/// Exact symbolic partials of the functional; each is homogeneous of degree
/// p_m - 1.
std::vector<MultiPoly> h_gradient(const HFunctional& h);

/// One symmetric m-by-m matrix per admissible multi-index
/// 0 <= p_1 <= ... <= p_{m-1} <= p_m - 2. Entry (i, j) for i <= j carries
/// (d_i + d_j)/2 times theta_k to the power (p_k + [k >= i] + [k >= j])^2.
struct DijMatrix {
    std::vector<unsigned> p;
    std::vector<std::vector<Rational>> entries;
};

std::vector<DijMatrix> dij_matrices(std::size_t m, unsigned p_m,
                                    const std::vector<Rational>& theta,
                                    const std::vector<double>& d);

struct ThetaFeasibility {
    bool feasible = false;
    /// Multi-index and positive-definiteness flag, one per matrix.
    std::vector<std::pair<std::vector<unsigned>, bool>> per_index;
    /// Closed-form threshold (d1+d2)/(2 sqrt(d1 d2)) when m == 2; feasibility
    /// is equivalent to theta_1 > threshold there.
    std::optional<double> threshold_m2;
    std::vector<Rational> theta;
};

/// Tests every DijMatrix for positive definiteness by Cholesky on the
/// diagonally normalized matrix (pivot tolerance 1e-13); normalization by
/// D^{-1/2} M D^{-1/2} preserves definiteness and keeps the enormous theta
/// powers out of floating point.
ThetaFeasibility theta_feasible(std::size_t m, unsigned p_m,
                                const std::vector<Rational>& theta,
                                const std::vector<double>& d);

/// Doubling search for a feasible weight vector: starts from
/// theta_i = 2 * max_{j > i} (d_i+d_j)/(2 sqrt(d_i d_j)) (or the given start),
/// doubles failing coordinates, and gives up beyond 2^20.
std::optional<std::vector<Rational>> find_feasible_theta(std::size_t m, unsigned p_m,
                                                         const std::vector<double>& d,
                                                         std::vector<Rational> start = {});

/// L(t_k) = sum_cells V * H(u(cell)) for every full-mode record.
std::vector<std::pair<double, double>> functional_series(const Trajectory& traj,
                                                         const Mesh& mesh,
                                                         const HFunctional& h);

}  // namespace rdmt
