#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdmt/mesh.hpp"
#include "rdmt/model.hpp"
#include "rdmt/poly.hpp"

namespace rdmt {

enum class Verdict { Certified, Falsified, Unknown };

std::string_view verdict_name(Verdict v);

/// Outcome of one structural check. Falsified reports carry an exact witness
/// point in the nonnegative orthant at which the re-evaluated inequality
/// fails by more than the falsification margin; Certified reports carry a
/// machine-checkable certificate.
struct ConditionReport {
    std::string condition;
    Verdict verdict = Verdict::Unknown;
    std::map<std::string, Rational> constants;
    std::vector<Rational> witness;
    std::map<std::string, std::string> certificate;
    std::string notes;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
};

struct CheckConfig {
    double falsify_margin = 1e-9;
    double compatibility_tol = 1e-10;
    int subdivision_depth = 12;
    int samples_per_face = 10000;
    std::vector<double> sample_box_scales{1.0, 10.0, 100.0};
    /// Starting index of the Halton sequence used for orthant sampling.
    std::uint64_t sampling_seed = 1;
};

/// Quasi-positivity: each component must be nonnegative on the orthant face
/// where its own variable vanishes. Certified via coefficient signs of the
/// face restrictions; falsified by low-discrepancy sampling of the faces.
ConditionReport check_quasi_positive(const std::vector<MultiPoly>& fields,
                                     const CheckConfig& config = {});

/// Linear mass control: q = sum_j coeffs[j] * fields[j] must satisfy
/// q(z) <= L * (sum z_j + 1) on the orthant for some L >= 0. Coefficients
/// must be strictly positive. Certified with the minimal coefficient-wise L,
/// via a univariate reduction for two-variable products, or falsified when
/// the leading form of q is positive somewhere on the unit simplex.
ConditionReport check_linear_control(const std::vector<MultiPoly>& fields,
                                     const std::vector<Rational>& coeffs,
                                     const CheckConfig& config = {});

/// Weighted mass control over the default weight grid a_i in K*{1,2,10,100},
/// a_m = 1, applied to both F and G. Certification is grid-relative: the
/// underlying condition quantifies over all weights a >= K, which a finite
/// grid cannot establish; the report carries that caveat.
ConditionReport check_weighted_control(const std::vector<MultiPoly>& fields_f,
                                       const std::vector<MultiPoly>& fields_g,
                                       const Rational& K,
                                       const std::vector<Rational>& grid_multipliers =
                                           {Rational(1), Rational(2), Rational(10),
                                            Rational(100)},
                                       const CheckConfig& config = {});

/// Two-component variant of the weighted control applied to the boundary
/// fields only.
ConditionReport check_boundary_control(const std::vector<MultiPoly>& fields_g,
                                       const Rational& K,
                                       const std::vector<Rational>& grid_multipliers =
                                           {Rational(1), Rational(2), Rational(10),
                                            Rational(100)},
                                       const CheckConfig& config = {});

/// Polynomial growth: constructive certificate with l = max total degree and
/// M = max coefficient-magnitude sum, so |field_i(z)| <= M (sum z_j + 1)^l
/// term by term on the orthant.
ConditionReport check_poly_bounded(const std::vector<MultiPoly>& fields);

/// Intermediate sums: every row of A*F (A lower triangular with positive
/// diagonal) must pass the linear control test; K is the max row constant.
ConditionReport check_intermediate_sum(const std::vector<MultiPoly>& fields,
                                       const std::vector<std::vector<Rational>>& a_matrix,
                                       const CheckConfig& config = {});

/// Compatibility of the initial data with the boundary condition:
/// d_i * (outward normal derivative of w_i) - G_i(w) evaluated exactly at
/// every boundary face midpoint must vanish to tolerance.
ConditionReport check_compatibility(const VectorFieldModel& model, const Mesh& mesh,
                                    const CheckConfig& config = {});

/// Whether q(z) <= 0 holds for all orthant z is required for the L = 0 branch
/// of the mass-control condition; this check certifies it coefficient-wise or
/// falsifies it by orthant sampling.
ConditionReport check_mass_control_zero(const std::vector<MultiPoly>& fields,
                                        const std::vector<Rational>& coeffs,
                                        const CheckConfig& config = {});

}  // namespace rdmt
