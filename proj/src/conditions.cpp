#include "rdmt/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rdmt/kernels.hpp"

namespace rdmt {
namespace {

constexpr std::array<std::uint32_t, 8> kHaltonPrimes{2, 3, 5, 7, 11, 13, 17, 19};

double halton(std::uint64_t index, std::uint32_t base) {
    double f = 1.0;
    double r = 0.0;
    while (index > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

inline double next_down(double x) {
    return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double next_up(double x) {
    return std::nextafter(x, std::numeric_limits<double>::infinity());
}

/// Closed interval with outward-rounded arithmetic.
struct Iv {
    double lo = 0.0;
    double hi = 0.0;
};

Iv iv_exact(const Rational& c) {
    const double d = c.to_double();  // truncated toward zero, error < 1 ulp
    return {next_down(d), next_up(d)};
}

Iv iv_add(Iv a, Iv b) { return {next_down(a.lo + b.lo), next_up(a.hi + b.hi)}; }

Iv iv_mul(Iv a, Iv b) {
    const std::array<double, 4> p{a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    const double lo = *std::min_element(p.begin(), p.end());
    const double hi = *std::max_element(p.begin(), p.end());
    return {next_down(lo), next_up(hi)};
}

/// x^e for x.lo >= 0.
Iv iv_pow_nonneg(Iv x, std::uint32_t e) {
    Iv out{1.0, 1.0};
    for (std::uint32_t k = 0; k < e; ++k) {
        out = {next_down(out.lo * x.lo), next_up(out.hi * x.hi)};
    }
    return out;
}

/// Interval enclosure of p over a box with nonnegative coordinates.
Iv poly_range_on_box(const MultiPoly& p, const std::vector<Iv>& box) {
    Iv acc{0.0, 0.0};
    for (const auto& [e, c] : p.terms()) {
        Iv mono{1.0, 1.0};
        for (std::size_t k = 0; k < box.size(); ++k) {
            if (e[k] > 0) mono = iv_mul(mono, iv_pow_nonneg(box[k], e[k]));
        }
        acc = iv_add(acc, iv_mul(iv_exact(c), mono));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Simplex falsification: search for a point of the unit simplex at which a
// polynomial exceeds the margin, by longest-edge bisection with interval
// pruning. Vertices stay exact dyadic rationals throughout.
// ---------------------------------------------------------------------------

struct SimplexNode {
    std::vector<std::vector<Rational>> verts;
    int depth = 0;
};

std::optional<std::vector<Rational>> find_positive_on_simplex(const MultiPoly& p,
                                                              const Rational& margin,
                                                              int max_depth,
                                                              bool* exhausted) {
    const std::size_t m = p.num_vars();
    if (exhausted != nullptr) *exhausted = false;
    if (m == 0) return std::nullopt;

    SimplexNode root;
    root.verts.assign(m, std::vector<Rational>(m, Rational(0)));
    for (std::size_t k = 0; k < m; ++k) root.verts[k][k] = Rational(1);

    std::vector<SimplexNode> stack{root};
    const Rational inv_m = Rational(1) / Rational(static_cast<long>(m));
    const double margin_d = margin.to_double();

    while (!stack.empty()) {
        SimplexNode node = std::move(stack.back());
        stack.pop_back();

        std::vector<Iv> box(m);
        for (std::size_t k = 0; k < m; ++k) {
            Rational lo = node.verts[0][k];
            Rational hi = node.verts[0][k];
            for (std::size_t v = 1; v < m; ++v) {
                lo = std::min(lo, node.verts[v][k]);
                hi = std::max(hi, node.verts[v][k]);
            }
            box[k] = {std::max(0.0, next_down(lo.to_double())), next_up(hi.to_double())};
        }
        if (poly_range_on_box(p, box).hi <= margin_d) continue;

        std::vector<Rational> centroid(m, Rational(0));
        for (std::size_t v = 0; v < m; ++v) {
            for (std::size_t k = 0; k < m; ++k) centroid[k] += node.verts[v][k];
        }
        for (std::size_t k = 0; k < m; ++k) centroid[k] *= inv_m;
        if (p.eval_exact(centroid) > margin) return centroid;

        // Vertices are often the extreme points; m == 1 has no edges to split.
        for (std::size_t v = 0; v < m; ++v) {
            if (p.eval_exact(node.verts[v]) > margin) return node.verts[v];
        }

        if (node.depth >= max_depth || m == 1) {
            if (exhausted != nullptr) *exhausted = true;
            continue;
        }

        // Longest edge, exact squared lengths; smallest (i, j) wins ties.
        std::size_t bi = 0, bj = 1;
        Rational best(-1);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                Rational len2(0);
                for (std::size_t k = 0; k < m; ++k) {
                    const Rational dk = node.verts[i][k] - node.verts[j][k];
                    len2 += dk * dk;
                }
                if (len2 > best) {
                    best = len2;
                    bi = i;
                    bj = j;
                }
            }
        }
        std::vector<Rational> mid(m);
        const Rational half(1, 2);
        for (std::size_t k = 0; k < m; ++k) {
            mid[k] = (node.verts[bi][k] + node.verts[bj][k]) * half;
        }
        SimplexNode a = node;
        a.verts[bi] = mid;
        a.depth = node.depth + 1;
        SimplexNode b = std::move(node);
        b.verts[bj] = mid;
        b.depth = a.depth;
        stack.push_back(std::move(a));
        stack.push_back(std::move(b));
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Univariate upper bound: rigorous upper bound for sup_{s >= 0} p(s), or
// nullopt when p is unbounded above. Critical points are isolated by
// recursive bisection with interval arithmetic on p'; cells narrower than the
// width target contribute their interval upper bound for p.
// ---------------------------------------------------------------------------

using UniPoly = std::vector<Rational>;  // coefficient of s^k at index k

UniPoly uni_trim(UniPoly p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
    return p;
}

UniPoly uni_derivative(const UniPoly& p) {
    UniPoly d;
    for (std::size_t k = 1; k < p.size(); ++k) {
        d.push_back(p[k] * Rational(static_cast<long>(k)));
    }
    return uni_trim(std::move(d));
}

Rational uni_eval_exact(const UniPoly& p, const Rational& s) {
    Rational acc(0);
    for (std::size_t k = p.size(); k-- > 0;) {
        acc = acc * s + p[k];
    }
    return acc;
}

Iv uni_range(const UniPoly& p, Iv x) {
    Iv acc{0.0, 0.0};
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].is_zero()) continue;
        acc = iv_add(acc, iv_mul(iv_exact(p[k]), iv_pow_nonneg(x, static_cast<std::uint32_t>(k))));
    }
    return acc;
}

/// 1 + max |a_k / a_d|: all real roots of p lie within [-B, B].
Rational cauchy_bound(const UniPoly& p) {
    Rational best(0);
    const Rational lead = p.back();
    for (std::size_t k = 0; k + 1 < p.size(); ++k) {
        best = std::max(best, (p[k] / lead).abs());
    }
    return best + Rational(1);
}

std::optional<Rational> max_on_halfline(const UniPoly& poly_in, double width_target) {
    const UniPoly p = uni_trim(poly_in);
    if (p.empty()) return Rational(0);
    if (p.size() == 1) return p[0];
    if (p.back().sign() > 0) return std::nullopt;  // p(s) -> +inf

    const UniPoly dp = uni_derivative(p);
    Rational bound = cauchy_bound(dp);
    if (bound < Rational(1)) bound = Rational(1);
    // Beyond the root bound of p', p is monotone; the leading coefficient is
    // negative, so p decreases there and sup_{s >= B} p = p(B).

    Rational exact_best = std::max(uni_eval_exact(p, Rational(0)), uni_eval_exact(p, bound));
    double ub = exact_best.to_double();

    struct Seg {
        Rational a, b;
    };
    std::vector<Seg> stack{{Rational(0), bound}};
    const Rational half(1, 2);
    while (!stack.empty()) {
        Seg seg = std::move(stack.back());
        stack.pop_back();
        const Iv x{std::max(0.0, next_down(seg.a.to_double())), next_up(seg.b.to_double())};
        const Iv dr = uni_range(dp, x);
        if (dr.lo > 0.0 || dr.hi < 0.0) {
            // Monotone: extrema at endpoints.
            exact_best = std::max(exact_best, uni_eval_exact(p, seg.a));
            exact_best = std::max(exact_best, uni_eval_exact(p, seg.b));
            continue;
        }
        if (x.hi - x.lo <= width_target) {
            ub = std::max(ub, uni_range(p, x).hi);
            continue;
        }
        const Rational mid = (seg.a + seg.b) * half;
        stack.push_back({mid, seg.b});
        stack.push_back({seg.a, mid});
    }
    ub = std::max(ub, next_up(exact_best.to_double()));
    Rational out = Rational::from_double(next_up(ub));
    if (out < exact_best) out = exact_best;
    return out;
}

// ---------------------------------------------------------------------------
// Linear-control core shared by the mass-control, weighted, boundary, and
// intermediate-sum checks.
// ---------------------------------------------------------------------------

struct ControlResult {
    Verdict verdict = Verdict::Unknown;
    Rational bound;  // certified L, valid when verdict == Certified
    std::vector<Rational> witness;
    std::string route;
    std::string notes;
};

ControlResult linear_control_core(const MultiPoly& q, const CheckConfig& config) {
    ControlResult out;
    if (q.is_zero()) {
        out.verdict = Verdict::Certified;
        out.bound = Rational(0);
        out.route = "zero_combination";
        return out;
    }

    bool all_nonpositive = true;
    bool high_degree_positive = false;
    Rational needed(0);  // max(0, constant coefficient, degree-1 coefficients)
    for (const auto& [e, c] : q.terms()) {
        const unsigned deg = std::accumulate(e.begin(), e.end(), 0u);
        if (c.sign() > 0) all_nonpositive = false;
        if (deg >= 2) {
            if (c.sign() > 0) high_degree_positive = true;
        } else {
            needed = std::max(needed, c);
        }
    }

    if (all_nonpositive) {
        out.verdict = Verdict::Certified;
        out.bound = Rational(0);
        out.route = "nonpositive_coefficients";
        return out;
    }
    if (!high_degree_positive) {
        out.verdict = Verdict::Certified;
        out.bound = needed;
        out.route = "coefficient_bound";
        return out;
    }

    // Two-variable product form q = u_i * p(u_j): bound p over the halfline.
    if (q.num_vars() == 2) {
        for (std::size_t pivot = 0; pivot < 2; ++pivot) {
            const std::size_t other = 1 - pivot;
            bool matches = true;
            UniPoly p;
            for (const auto& [e, c] : q.terms()) {
                if (e[pivot] != 1) {
                    matches = false;
                    break;
                }
                if (p.size() <= e[other]) p.resize(e[other] + 1, Rational(0));
                p[e[other]] += c;
            }
            if (!matches) continue;
            const auto cmax = max_on_halfline(p, 1e-12);
            if (!cmax.has_value()) continue;
            out.verdict = Verdict::Certified;
            out.bound = std::max(Rational(0), *cmax);
            out.route = "univariate_reduction";
            std::ostringstream ss;
            ss << "q = u" << (pivot + 1) << " * p(u" << (other + 1)
               << "); sup p over the halfline <= " << out.bound.to_double();
            out.notes = ss.str();
            return out;
        }
    }

    // Falsification: a strictly positive leading form on the unit simplex
    // makes q/(sum z + 1) unbounded along the corresponding ray.
    const MultiPoly lf = q.leading_form();
    bool has_positive = false;
    for (const auto& [e, c] : lf.terms()) {
        (void)e;
        if (c.sign() > 0) {
            has_positive = true;
            break;
        }
    }
    if (has_positive) {
        bool exhausted = false;
        const Rational margin = Rational::from_double(config.falsify_margin);
        const auto witness =
            find_positive_on_simplex(lf, margin, config.subdivision_depth, &exhausted);
        if (witness.has_value()) {
            out.verdict = Verdict::Falsified;
            out.witness = *witness;
            out.route = "leading_form_simplex";
            std::ostringstream ss;
            ss << "leading form is " << lf.eval_exact(*witness).to_double()
               << " at the witness; the combination grows without linear control along that ray";
            out.notes = ss.str();
            return out;
        }
        out.notes = exhausted ? "simplex subdivision depth exhausted without a witness"
                              : "leading form is nonpositive on the unit simplex";
    } else {
        out.notes = "no certificate route applies and the leading form is nonpositive";
    }
    out.verdict = Verdict::Unknown;
    out.route = "none";
    return out;
}

void require_field_family(const std::vector<MultiPoly>& fields) {
    if (fields.empty()) throw std::invalid_argument("empty field sequence");
    const std::size_t m = fields.size();
    for (const auto& f : fields) {
        if (f.num_vars() != m) {
            throw std::invalid_argument("field dimension mismatch: need m polynomials in m variables");
        }
    }
}

std::string point_to_string(const std::vector<Rational>& z) {
    std::ostringstream ss;
    ss << "(";
    for (std::size_t k = 0; k < z.size(); ++k) {
        if (k > 0) ss << ", ";
        ss << z[k].to_string();
    }
    ss << ")";
    return ss.str();
}

/// Halton sample of the orthant box [0, scale]^m with coordinate `face`
/// pinned to zero (face = npos samples the full box).
std::vector<double> face_sample(std::size_t m, std::size_t face, double scale,
                                std::uint64_t index) {
    std::vector<double> z(m, 0.0);
    std::size_t dim = 0;
    for (std::size_t k = 0; k < m; ++k) {
        if (k == face) continue;
        z[k] = scale * halton(index, kHaltonPrimes[dim % kHaltonPrimes.size()]);
        ++dim;
    }
    return z;
}

std::vector<Rational> exact_point(const std::vector<double>& z) {
    std::vector<Rational> out;
    out.reserve(z.size());
    for (double v : z) out.push_back(Rational::from_double(v));
    return out;
}

}  // namespace

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Certified: return "Certified";
        case Verdict::Falsified: return "Falsified";
        case Verdict::Unknown: return "Unknown";
    }
    return "Unknown";
}

nlohmann::json ConditionReport::to_json() const {
    nlohmann::json j;
    j["condition"] = condition;
    j["verdict"] = std::string(verdict_name(verdict));
    nlohmann::json consts = nlohmann::json::object();
    for (const auto& [k, v] : constants) consts[k] = v.to_string();
    j["constants"] = consts;
    nlohmann::json wit = nlohmann::json::array();
    for (const auto& v : witness) wit.push_back(v.to_string());
    j["witness"] = wit;
    nlohmann::json cert = nlohmann::json::object();
    for (const auto& [k, v] : certificate) cert[k] = v;
    j["certificate"] = cert;
    j["notes"] = notes;
    j["seed"] = seed;
    return j;
}

ConditionReport check_quasi_positive(const std::vector<MultiPoly>& fields,
                                     const CheckConfig& config) {
    require_field_family(fields);
    const std::size_t m = fields.size();

    ConditionReport report;
    report.condition = "quasi_positivity";
    report.seed = config.sampling_seed;

    std::vector<MultiPoly> restrictions;
    restrictions.reserve(m);
    bool all_faces_certified = true;
    for (std::size_t i = 0; i < m; ++i) {
        MultiPoly r = fields[i].substitute_zero(i + 1);
        bool nonneg = true;
        for (const auto& [e, c] : r.terms()) {
            (void)e;
            if (c.sign() < 0) {
                nonneg = false;
                break;
            }
        }
        const std::string key = "face_u" + std::to_string(i + 1);
        report.certificate[key] = nonneg ? "nonnegative_coefficients" : "inconclusive";
        if (!nonneg) all_faces_certified = false;
        restrictions.push_back(std::move(r));
    }

    if (all_faces_certified) {
        report.verdict = Verdict::Certified;
        report.notes = "every face restriction has nonnegative coefficients";
        return report;
    }

    const Rational margin = Rational::from_double(config.falsify_margin);
    for (std::size_t i = 0; i < m; ++i) {
        if (report.certificate["face_u" + std::to_string(i + 1)] != "inconclusive") continue;
        const auto compiled = kernels::CompiledPoly::compile(restrictions[i]);
        for (double scale : config.sample_box_scales) {
            for (int s = 0; s < config.samples_per_face; ++s) {
                const auto z =
                    face_sample(m, i, scale, config.sampling_seed + static_cast<std::uint64_t>(s));
                if (compiled.eval(z) >= -config.falsify_margin) continue;
                const auto zr = exact_point(z);
                if (restrictions[i].eval_exact(zr) < -margin) {
                    report.verdict = Verdict::Falsified;
                    report.witness = zr;
                    report.notes = "component " + std::to_string(i + 1) +
                                   " is negative on its zero face at " + point_to_string(zr);
                    return report;
                }
            }
        }
    }

    report.verdict = Verdict::Unknown;
    report.notes = "no coefficient certificate and no sampled violation";
    return report;
}

ConditionReport check_linear_control(const std::vector<MultiPoly>& fields,
                                     const std::vector<Rational>& coeffs,
                                     const CheckConfig& config) {
    require_field_family(fields);
    if (coeffs.size() != fields.size()) {
        throw std::invalid_argument("coefficient count must match field count");
    }
    for (const auto& c : coeffs) {
        if (c.sign() <= 0) throw std::invalid_argument("control coefficients must be positive");
    }

    const MultiPoly q = linear_combination(coeffs, fields);
    const ControlResult res = linear_control_core(q, config);

    ConditionReport report;
    report.condition = "mass_control";
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        report.constants["b" + std::to_string(k + 1)] = coeffs[k];
    }
    report.verdict = res.verdict;
    report.witness = res.witness;
    report.certificate["route"] = res.route;
    report.notes = res.notes;
    if (res.verdict == Verdict::Certified) {
        report.constants["L1"] = res.bound;
        report.certificate["combination"] = q.to_string();
    } else if (res.verdict == Verdict::Falsified) {
        report.certificate["recheck"] = "leading_form";
        report.certificate["leading_form"] = q.leading_form().to_string();
    }
    return report;
}

namespace {

ConditionReport weighted_grid_check(const std::vector<MultiPoly>* fields_f,
                                    const std::vector<MultiPoly>& fields_g,
                                    const Rational& K,
                                    const std::vector<Rational>& grid_multipliers,
                                    const CheckConfig& config, std::string condition_id) {
    require_field_family(fields_g);
    if (fields_f != nullptr) require_field_family(*fields_f);
    if (grid_multipliers.empty()) throw std::invalid_argument("empty weight grid");
    if (K.sign() <= 0) throw std::invalid_argument("K must be positive");
    const std::size_t m = fields_g.size();
    if (m < 2) throw std::invalid_argument("weighted control needs at least two components");

    ConditionReport report;
    report.condition = std::move(condition_id);
    report.constants["K"] = K;

    std::vector<Rational> grid_values;
    grid_values.reserve(grid_multipliers.size());
    for (const auto& mult : grid_multipliers) {
        if (mult < Rational(1)) throw std::invalid_argument("grid multipliers must be >= 1");
        grid_values.push_back(K * mult);
    }

    const std::size_t free_dims = m - 1;
    std::vector<std::size_t> idx(free_dims, 0);
    Rational max_bound(0);
    bool any_unknown = false;

    while (true) {
        std::vector<Rational> a(m);
        for (std::size_t k = 0; k < free_dims; ++k) a[k] = grid_values[idx[k]];
        a[m - 1] = Rational(1);

        const std::array<const std::vector<MultiPoly>*, 2> families{fields_f, &fields_g};
        const std::array<const char*, 2> names{"F", "G"};
        for (std::size_t fam = 0; fam < 2; ++fam) {
            if (families[fam] == nullptr) continue;
            const MultiPoly q = linear_combination(a, *families[fam]);
            const ControlResult res = linear_control_core(q, config);
            if (res.verdict == Verdict::Falsified) {
                report.verdict = Verdict::Falsified;
                report.witness = res.witness;
                for (std::size_t k = 0; k < m; ++k) {
                    report.constants["a" + std::to_string(k + 1)] = a[k];
                }
                report.certificate["family"] = names[fam];
                report.certificate["recheck"] = "leading_form";
                report.certificate["leading_form"] = q.leading_form().to_string();
                report.notes = "weights a = " + point_to_string(a) + " on " + names[fam] +
                               ": " + res.notes;
                return report;
            }
            if (res.verdict == Verdict::Unknown) {
                any_unknown = true;
            } else {
                max_bound = std::max(max_bound, res.bound);
            }
        }

        std::size_t dim = 0;
        for (; dim < free_dims; ++dim) {
            if (++idx[dim] < grid_values.size()) break;
            idx[dim] = 0;
        }
        if (dim == free_dims) break;
    }

    report.notes =
        "grid-relative only: the condition quantifies over all weights a >= K, "
        "which a finite grid cannot certify";
    if (any_unknown) {
        report.verdict = Verdict::Unknown;
    } else {
        report.verdict = Verdict::Certified;
        report.constants["L_max"] = max_bound;
        report.certificate["grid"] = std::to_string(grid_values.size()) + " values per weight";
    }
    return report;
}

}  // namespace

ConditionReport check_weighted_control(const std::vector<MultiPoly>& fields_f,
                                       const std::vector<MultiPoly>& fields_g,
                                       const Rational& K,
                                       const std::vector<Rational>& grid_multipliers,
                                       const CheckConfig& config) {
    return weighted_grid_check(&fields_f, fields_g, K, grid_multipliers, config,
                               "weighted_mass_control");
}

ConditionReport check_boundary_control(const std::vector<MultiPoly>& fields_g,
                                       const Rational& K,
                                       const std::vector<Rational>& grid_multipliers,
                                       const CheckConfig& config) {
    if (fields_g.size() != 2) {
        throw std::invalid_argument("boundary control is a two-component check");
    }
    return weighted_grid_check(nullptr, fields_g, K, grid_multipliers, config,
                               "boundary_mass_control");
}

ConditionReport check_poly_bounded(const std::vector<MultiPoly>& fields) {
    ConditionReport report;
    report.condition = "polynomial_growth";
    unsigned l = 0;
    Rational big_m(0);
    for (const auto& f : fields) {
        if (!f.is_zero()) l = std::max(l, f.total_degree());
        big_m = std::max(big_m, f.coefficient_abs_sum());
    }
    report.verdict = Verdict::Certified;
    report.constants["l"] = Rational(static_cast<long>(l));
    report.constants["M"] = big_m;
    report.certificate["term_by_term"] =
        "|c z^e| <= |c| (sum z_j + 1)^{|e|} on the orthant; sum |c| <= M and |e| <= l "
        "for every term of every component";
    if (big_m.is_zero()) report.notes = "all fields vanish; trivially bounded with M = 0";
    return report;
}

ConditionReport check_intermediate_sum(const std::vector<MultiPoly>& fields,
                                       const std::vector<std::vector<Rational>>& a_matrix,
                                       const CheckConfig& config) {
    require_field_family(fields);
    const std::size_t m = fields.size();
    if (a_matrix.size() != m) throw std::invalid_argument("matrix must be m x m");
    for (std::size_t i = 0; i < m; ++i) {
        if (a_matrix[i].size() != m) throw std::invalid_argument("matrix must be m x m");
        if (a_matrix[i][i].sign() <= 0) {
            throw std::invalid_argument("matrix diagonal must be positive");
        }
        for (std::size_t j = i + 1; j < m; ++j) {
            if (!a_matrix[i][j].is_zero()) {
                throw std::invalid_argument("matrix must be lower triangular");
            }
        }
    }

    ConditionReport report;
    report.condition = "intermediate_sums";
    Rational max_bound(0);
    bool any_unknown = false;
    for (std::size_t i = 0; i < m; ++i) {
        MultiPoly row(m);
        for (std::size_t j = 0; j < m; ++j) {
            if (!a_matrix[i][j].is_zero()) row = row + fields[j].scaled(a_matrix[i][j]);
        }
        const ControlResult res = linear_control_core(row, config);
        const std::string key = "row" + std::to_string(i + 1);
        if (res.verdict == Verdict::Falsified) {
            report.verdict = Verdict::Falsified;
            report.witness = res.witness;
            report.certificate["recheck"] = "leading_form";
            report.certificate["leading_form"] = row.leading_form().to_string();
            report.notes = key + ": " + res.notes;
            return report;
        }
        if (res.verdict == Verdict::Unknown) {
            any_unknown = true;
            report.certificate[key] = "inconclusive";
        } else {
            report.certificate[key] = res.route;
            max_bound = std::max(max_bound, res.bound);
        }
    }
    if (any_unknown) {
        report.verdict = Verdict::Unknown;
        report.notes = "some rows lack a certificate";
    } else {
        report.verdict = Verdict::Certified;
        report.constants["K"] = max_bound;
    }
    return report;
}

ConditionReport check_compatibility(const VectorFieldModel& model, const Mesh& mesh,
                                    const CheckConfig& config) {
    model.validate();
    if (model.initial.size() != model.m) {
        throw std::invalid_argument("compatibility check needs initial data");
    }
    for (const auto& w : model.initial) {
        if (w.num_vars() != static_cast<std::size_t>(mesh.dim)) {
            throw std::invalid_argument("initial data dimension does not match the mesh");
        }
    }

    std::vector<std::vector<MultiPoly>> grads(model.m);
    for (std::size_t i = 0; i < model.m; ++i) {
        for (int axis = 0; axis < mesh.dim; ++axis) {
            grads[i].push_back(model.initial[i].partial(static_cast<std::size_t>(axis) + 1));
        }
    }

    ConditionReport report;
    report.condition = "compatibility";

    Rational worst(0);
    Rational max_g(0);
    std::vector<Rational> worst_point;
    std::size_t worst_component = 0;

    for (const auto& face : mesh.boundary_faces) {
        std::vector<Rational> x;
        for (int axis = 0; axis < mesh.dim; ++axis) {
            x.push_back(Rational::from_double(face.midpoint[static_cast<std::size_t>(axis)]));
        }
        std::vector<Rational> w(model.m);
        for (std::size_t i = 0; i < model.m; ++i) w[i] = model.initial[i].eval_exact(x);

        for (std::size_t i = 0; i < model.m; ++i) {
            const Rational normal_derivative =
                grads[i][static_cast<std::size_t>(face.axis)].eval_exact(x) *
                Rational(face.sign);
            const Rational g_val = model.fields_g[i].eval_exact(w);
            const Rational residual =
                Rational::from_double(model.d[i]) * normal_derivative - g_val;
            max_g = std::max(max_g, g_val.abs());
            if (residual.abs() > worst) {
                worst = residual.abs();
                worst_point = x;
                worst_component = i + 1;
            }
        }
    }

    const Rational tol =
        Rational::from_double(config.compatibility_tol) * (Rational(1) + max_g);
    report.constants["max_residual"] = worst;
    report.constants["tolerance"] = tol;
    if (worst <= tol) {
        report.verdict = Verdict::Certified;
        report.certificate["residual"] = "d_i dw_i/dn - G_i(w) vanishes at every boundary face midpoint";
    } else {
        report.verdict = Verdict::Falsified;
        report.witness = worst_point;
        report.notes = "worst residual " + worst.to_string() + " for component " +
                       std::to_string(worst_component);
    }
    return report;
}

ConditionReport check_mass_control_zero(const std::vector<MultiPoly>& fields,
                                        const std::vector<Rational>& coeffs,
                                        const CheckConfig& config) {
    require_field_family(fields);
    if (coeffs.size() != fields.size()) {
        throw std::invalid_argument("coefficient count must match field count");
    }
    const MultiPoly q = linear_combination(coeffs, fields);

    ConditionReport report;
    report.condition = "mass_control_zero";
    report.seed = config.sampling_seed;

    bool all_nonpositive = true;
    for (const auto& [e, c] : q.terms()) {
        (void)e;
        if (c.sign() > 0) {
            all_nonpositive = false;
            break;
        }
    }
    if (all_nonpositive) {
        report.verdict = Verdict::Certified;
        report.constants["L1"] = Rational(0);
        report.certificate["route"] =
            q.is_zero() ? "zero_combination" : "nonpositive_coefficients";
        return report;
    }

    const Rational margin = Rational::from_double(config.falsify_margin);
    const auto compiled = kernels::CompiledPoly::compile(q);
    const std::size_t m = fields.size();
    for (double scale : config.sample_box_scales) {
        for (int s = 0; s < config.samples_per_face; ++s) {
            const auto z = face_sample(m, static_cast<std::size_t>(-1), scale,
                                       config.sampling_seed + static_cast<std::uint64_t>(s));
            if (compiled.eval(z) <= config.falsify_margin) continue;
            const auto zr = exact_point(z);
            if (q.eval_exact(zr) > margin) {
                report.verdict = Verdict::Falsified;
                report.witness = zr;
                report.notes = "combination is positive at " + point_to_string(zr) +
                               ", so the zero-constant branch fails";
                return report;
            }
        }
    }
    report.verdict = Verdict::Unknown;
    report.notes = "positive coefficients present but no sampled violation";
    return report;
}

}  // namespace rdmt
