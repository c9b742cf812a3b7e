#include "rdmt/model_file.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rdmt {
namespace {

struct Entry {
    std::string section;
    std::string key;
    std::string value;
    std::size_t line = 0;
};

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<Entry> tokenize(const std::string& text) {
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ModelFileError(line_no, "unterminated section header");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            if (section.empty()) throw ModelFileError(line_no, "empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ModelFileError(line_no, "expected key = value");
        }
        Entry e;
        e.section = section;
        e.key = trim(std::string_view(t).substr(0, eq));
        e.value = trim(std::string_view(t).substr(eq + 1));
        e.line = line_no;
        if (e.section.empty()) throw ModelFileError(line_no, "entry before any [section]");
        if (e.key.empty()) throw ModelFileError(line_no, "empty key");
        entries.push_back(std::move(e));
    }
    return entries;
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : value) {
        if (c == ',') {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

Rational parse_rational(const std::string& value, std::size_t line) {
    try {
        const bool neg = !value.empty() && value.front() == '-';
        const Rational r = Rational::from_string(neg ? value.substr(1) : value);
        return neg ? -r : r;
    } catch (const std::exception& e) {
        throw ModelFileError(line, std::string("bad rational value: ") + e.what());
    }
}

double parse_double(const std::string& value, std::size_t line) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ModelFileError(line, "bad numeric value: " + value);
    }
}

long parse_int(const std::string& value, std::size_t line) {
    try {
        std::size_t used = 0;
        const long v = std::stol(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ModelFileError(line, "bad integer value: " + value);
    }
}

/// Index of keys like "F3" / "w1"; zero when the key does not match.
std::size_t indexed_key(const std::string& key, char prefix) {
    if (key.size() < 2 || key[0] != prefix) return 0;
    std::size_t idx = 0;
    for (std::size_t k = 1; k < key.size(); ++k) {
        if (!std::isdigit(static_cast<unsigned char>(key[k]))) return 0;
        idx = idx * 10 + static_cast<std::size_t>(key[k] - '0');
    }
    return idx;
}

}  // namespace

ModelFile ModelFile::parse(const std::string& text) {
    return parse(text, {});
}

ModelFile ModelFile::parse(const std::string& text,
                           const std::map<std::string, Rational>& constant_overrides) {
    const auto entries = tokenize(text);

    ModelFile mf;
    mf.source_text = text;

    // Constants first; field expressions depend on them.
    for (const auto& e : entries) {
        if (e.section != "constants") continue;
        mf.model.constants[e.key] = parse_rational(e.value, e.line);
    }
    for (const auto& [name, value] : constant_overrides) {
        auto it = mf.model.constants.find(name);
        if (it == mf.model.constants.end()) {
            throw ModelFileError(0, "override names an undefined constant: " + name);
        }
        it->second = value;
    }

    // m and d before the field expressions.
    for (const auto& e : entries) {
        if (e.section != "model") continue;
        if (e.key == "m") {
            const long m = parse_int(e.value, e.line);
            if (m < 1) throw ModelFileError(e.line, "m must be at least 1");
            mf.model.m = static_cast<std::size_t>(m);
        } else if (e.key == "d") {
            for (const auto& part : split_list(e.value)) {
                mf.model.d.push_back(parse_rational(part, e.line).to_double());
            }
        }
    }
    if (mf.model.m == 0) throw ModelFileError(0, "missing m in [model]");
    if (mf.model.d.size() != mf.model.m) {
        throw ModelFileError(0, "d must list one diffusion constant per component");
    }

    const std::size_t m = mf.model.m;
    mf.model.fields_f.assign(m, MultiPoly(m));
    mf.model.fields_g.assign(m, MultiPoly(m));
    std::vector<bool> seen_w(m, false);

    bool domain_rect = false;
    bool has_initial = false;

    for (const auto& e : entries) {
        if (e.section == "constants") continue;
        if (e.section == "model") {
            if (e.key == "m" || e.key == "d") continue;
            std::size_t idx = indexed_key(e.key, 'F');
            std::vector<MultiPoly>* family = &mf.model.fields_f;
            if (idx == 0) {
                idx = indexed_key(e.key, 'G');
                family = &mf.model.fields_g;
            }
            if (idx == 0 || idx > m) {
                throw ModelFileError(e.line, "unknown [model] key: " + e.key);
            }
            try {
                (*family)[idx - 1] =
                    parse_expression(e.value, m, "u", &mf.model.constants);
            } catch (const ExprError& ex) {
                throw ModelFileError(e.line, "in " + e.key + ": " + ex.what());
            }
        } else if (e.section == "domain") {
            if (e.key == "kind") {
                if (e.value == "interval") {
                    mf.domain.dim = 1;
                } else if (e.value == "rectangle") {
                    mf.domain.dim = 2;
                    domain_rect = true;
                } else {
                    throw ModelFileError(e.line, "domain kind must be interval or rectangle");
                }
            } else if (e.key == "length" || e.key == "lx") {
                mf.domain.lx = parse_double(e.value, e.line);
            } else if (e.key == "ly") {
                mf.domain.ly = parse_double(e.value, e.line);
            } else if (e.key == "cells" || e.key == "nx") {
                mf.domain.nx = static_cast<std::size_t>(parse_int(e.value, e.line));
            } else if (e.key == "ny") {
                mf.domain.ny = static_cast<std::size_t>(parse_int(e.value, e.line));
            } else {
                throw ModelFileError(e.line, "unknown [domain] key: " + e.key);
            }
        } else if (e.section == "initial") {
            const std::size_t idx = indexed_key(e.key, 'w');
            if (idx == 0 || idx > m) {
                throw ModelFileError(e.line, "unknown [initial] key: " + e.key);
            }
            has_initial = true;
            seen_w[idx - 1] = true;
            if (mf.model.initial.empty()) {
                // Dimension fixed after the domain section is known; parse later.
            }
            // Defer parsing until the domain dimension is final.
        } else if (e.section == "solver") {
            if (e.key == "dt") {
                mf.solver.dt_base = parse_double(e.value, e.line);
            } else if (e.key == "t_end") {
                mf.solver.t_end = parse_double(e.value, e.line);
            } else if (e.key == "u_max") {
                mf.solver.u_max = parse_double(e.value, e.line);
            } else if (e.key == "dt_min") {
                mf.solver.dt_min = parse_double(e.value, e.line);
            } else if (e.key == "linear_tol") {
                mf.solver.linear_tol = parse_double(e.value, e.line);
            } else if (e.key == "clamp_tol") {
                mf.solver.clamp_tol = parse_double(e.value, e.line);
            } else if (e.key == "output_stride") {
                mf.solver.output_stride = static_cast<int>(parse_int(e.value, e.line));
            } else if (e.key == "records") {
                if (e.value == "full") {
                    mf.solver.full_records = true;
                } else if (e.value == "light") {
                    mf.solver.full_records = false;
                } else {
                    throw ModelFileError(e.line, "records must be full or light");
                }
            } else {
                throw ModelFileError(e.line, "unknown [solver] key: " + e.key);
            }
        } else if (e.section == "diagnostics") {
            if (e.key == "p_list") {
                for (const auto& part : split_list(e.value)) {
                    if (part == "inf") {
                        mf.diagnostics.p_list.push_back(
                            std::numeric_limits<double>::infinity());
                    } else {
                        mf.diagnostics.p_list.push_back(parse_double(part, e.line));
                    }
                }
            } else if (e.key == "b") {
                for (const auto& part : split_list(e.value)) {
                    mf.diagnostics.b.push_back(parse_rational(part, e.line));
                }
            } else if (e.key == "lyapunov_order") {
                const long p = parse_int(e.value, e.line);
                if (p < 2) throw ModelFileError(e.line, "lyapunov_order must be >= 2");
                mf.diagnostics.lyapunov_order = static_cast<unsigned>(p);
                mf.diagnostics.lyapunov_requested = true;
            } else if (e.key == "lyapunov_theta") {
                mf.diagnostics.lyapunov_requested = true;
                if (e.value == "auto") {
                    mf.diagnostics.theta_auto = true;
                } else {
                    mf.diagnostics.theta_auto = false;
                    for (const auto& part : split_list(e.value)) {
                        mf.diagnostics.theta.push_back(parse_rational(part, e.line));
                    }
                }
            } else {
                throw ModelFileError(e.line, "unknown [diagnostics] key: " + e.key);
            }
        } else {
            throw ModelFileError(e.line, "unknown section: [" + e.section + "]");
        }
    }

    // Initial data now that the spatial dimension is settled.
    if (has_initial) {
        const std::vector<std::string> names =
            mf.domain.dim == 1 ? std::vector<std::string>{"x"}
                               : std::vector<std::string>{"x", "y"};
        mf.model.initial.assign(m, MultiPoly(names.size()));
        for (const auto& e : entries) {
            if (e.section != "initial") continue;
            const std::size_t idx = indexed_key(e.key, 'w');
            try {
                mf.model.initial[idx - 1] =
                    parse_expression(e.value, names, &mf.model.constants);
            } catch (const ExprError& ex) {
                throw ModelFileError(e.line, "in " + e.key + ": " + ex.what());
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (!seen_w[i]) {
                throw ModelFileError(0, "missing initial data w" + std::to_string(i + 1));
            }
        }
    }

    if (!domain_rect) mf.domain.dim = 1;
    if (mf.diagnostics.p_list.empty()) {
        mf.diagnostics.p_list = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    }
    if (mf.diagnostics.b.empty()) {
        mf.diagnostics.b.assign(m, Rational(1));
    }
    if (mf.diagnostics.b.size() != m) {
        throw ModelFileError(0, "b must list one weight per component");
    }
    mf.model.validate();
    return mf;
}

Mesh ModelFile::build_mesh() const {
    if (domain.dim == 1) return build_interval(domain.lx, domain.nx);
    return build_rectangle(domain.lx, domain.ly, domain.nx, domain.ny);
}

std::string ModelFile::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : source_text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> preset_names() {
    return {"example1", "example2", "example3", "example4"};
}

std::string preset_text(const std::string& name) {
    if (name == "example1") {
        return R"(# Two components with opposite interior reactions and an antisymmetric
# boundary exchange; u1 stays inside the invariant region [0, max(w1, 1)].

[model]
m = 2
d = 1, 2
F1 = u2^4*(1-u1)^3
F2 = u2^4*(u1-1)^3
G1 = -u1^2*u2^2
G2 = u1^2*u2^2

[domain]
kind = interval
length = 1
cells = 200

[initial]
w1 = 1/2
w2 = 1

[solver]
t_end = 10

[diagnostics]
b = 1, 1
)";
    }
    if (name == "example2") {
        return R"(# Brusselator-type kinetics acting through the boundary; the interior is
# pure diffusion. Initial data sits at the boundary equilibrium (alpha/beta, beta).

[constants]
alpha = 1
beta = 2

[model]
m = 2
d = 1, 1
F1 = 0
F2 = 0
G1 = alpha*u2 - u2^2*u1
G2 = beta - (alpha+1)*u2 + u2^2*u1

[domain]
kind = interval
length = 1
cells = 200

[initial]
w1 = 1/2
w2 = 2

[solver]
t_end = 10

[diagnostics]
b = 1, 1
)";
    }
    if (name == "example3") {
        return R"(# Surface reaction R1 + R2 <-> P1 with forward/reverse rates k_f, k_r;
# the weighted mass (1/2)u1 + (1/2)u2 + u3 is conserved exactly.

[constants]
k_f = 1
k_r = 1

[model]
m = 3
d = 1, 2, 3
F1 = 0
F2 = 0
F3 = 0
G1 = -k_f*u1*u2 + k_r*u3
G2 = -k_f*u1*u2 + k_r*u3
G3 = k_f*u1*u2 - k_r*u3

[domain]
kind = interval
length = 1
cells = 200

[initial]
w1 = 1
w2 = 1
w3 = 1

[solver]
t_end = 10

[diagnostics]
b = 1/2, 1/2, 1
)";
    }
    if (name == "example4") {
        return R"(# Boundary fields with no linear intermediate-sums structure; the weighted
# functional machinery still applies, so solutions stay bounded.

[constants]
alpha = 1
beta = 1

[model]
m = 2
d = 1, 2
F1 = 0
F2 = 0
G1 = alpha*u1*u2^3 - u1*u2^2
G2 = u1*u2^2 - beta*u1*u2^6

[domain]
kind = interval
length = 1
cells = 200

[initial]
w1 = 1
w2 = 1

[solver]
t_end = 10

[diagnostics]
b = 1, 1
lyapunov_order = 2
lyapunov_theta = auto
)";
    }
    std::string names;
    for (const auto& n : preset_names()) {
        if (!names.empty()) names += ", ";
        names += n;
    }
    throw std::invalid_argument("unknown preset '" + name + "'; valid names: " + names);
}

std::vector<ConditionReport> standard_checks(const ModelFile& mf, const Mesh& mesh,
                                             const CheckConfig& config) {
    const auto& model = mf.model;
    std::vector<ConditionReport> reports;

    {
        ConditionReport lip;
        lip.condition = "local_lipschitz";
        lip.verdict = Verdict::Certified;
        lip.certificate["route"] = "polynomial_fields";
        lip.notes = "polynomial fields are smooth, hence locally Lipschitz";
        reports.push_back(std::move(lip));
    }

    {
        const ConditionReport qf = check_quasi_positive(model.fields_f, config);
        const ConditionReport qg = check_quasi_positive(model.fields_g, config);
        ConditionReport merged;
        merged.condition = "quasi_positivity";
        merged.seed = config.sampling_seed;
        if (qf.verdict == Verdict::Falsified || qg.verdict == Verdict::Falsified) {
            const ConditionReport& bad = qf.verdict == Verdict::Falsified ? qf : qg;
            merged.verdict = Verdict::Falsified;
            merged.witness = bad.witness;
            merged.notes = std::string(qf.verdict == Verdict::Falsified ? "F" : "G") + ": " +
                           bad.notes;
        } else if (qf.verdict == Verdict::Certified && qg.verdict == Verdict::Certified) {
            merged.verdict = Verdict::Certified;
            merged.notes = "face restrictions of F and G have nonnegative coefficients";
        } else {
            merged.verdict = Verdict::Unknown;
            merged.notes = "no certificate for at least one family";
        }
        for (const auto& [k, v] : qf.certificate) merged.certificate["F_" + k] = v;
        for (const auto& [k, v] : qg.certificate) merged.certificate["G_" + k] = v;
        reports.push_back(std::move(merged));
    }

    {
        // Combined mass control: both families under the same weights.
        const ConditionReport rf = check_linear_control(model.fields_f, mf.diagnostics.b, config);
        const ConditionReport rg = check_linear_control(model.fields_g, mf.diagnostics.b, config);
        ConditionReport merged;
        merged.condition = "mass_control";
        for (std::size_t k = 0; k < mf.diagnostics.b.size(); ++k) {
            merged.constants["b" + std::to_string(k + 1)] = mf.diagnostics.b[k];
        }
        if (rf.verdict == Verdict::Falsified || rg.verdict == Verdict::Falsified) {
            const ConditionReport& bad = rf.verdict == Verdict::Falsified ? rf : rg;
            merged.verdict = Verdict::Falsified;
            merged.witness = bad.witness;
            merged.certificate = bad.certificate;
            merged.notes = std::string(rf.verdict == Verdict::Falsified ? "F" : "G") + ": " +
                           bad.notes;
        } else if (rf.verdict == Verdict::Certified && rg.verdict == Verdict::Certified) {
            merged.verdict = Verdict::Certified;
            merged.constants["L1"] =
                std::max(rf.constants.at("L1"), rg.constants.at("L1"));
            merged.certificate["F_route"] = rf.certificate.at("route");
            merged.certificate["G_route"] = rg.certificate.at("route");
        } else {
            merged.verdict = Verdict::Unknown;
            merged.notes = "no certificate for at least one family";
        }
        reports.push_back(std::move(merged));
    }

    {
        std::vector<MultiPoly> both = model.fields_f;
        both.insert(both.end(), model.fields_g.begin(), model.fields_g.end());
        ConditionReport zf = check_mass_control_zero(both, [&] {
            std::vector<Rational> bb = mf.diagnostics.b;
            bb.insert(bb.end(), mf.diagnostics.b.begin(), mf.diagnostics.b.end());
            return bb;
        }(), config);
        reports.push_back(std::move(zf));
    }

    if (model.m >= 2) {
        reports.push_back(check_weighted_control(model.fields_f, model.fields_g, Rational(1),
                                                 {Rational(1), Rational(2), Rational(10),
                                                  Rational(100)},
                                                 config));
        if (model.m == 2) {
            reports.push_back(check_boundary_control(model.fields_g, Rational(1),
                                                     {Rational(1), Rational(2), Rational(10),
                                                      Rational(100)},
                                                     config));
        }
    }

    {
        std::vector<MultiPoly> both = model.fields_f;
        both.insert(both.end(), model.fields_g.begin(), model.fields_g.end());
        reports.push_back(check_poly_bounded(both));
    }

    {
        // Intermediate sums with the identity matrix: component-wise control of F.
        std::vector<std::vector<Rational>> identity(model.m,
                                                    std::vector<Rational>(model.m, Rational(0)));
        for (std::size_t i = 0; i < model.m; ++i) identity[i][i] = Rational(1);
        ConditionReport r = check_intermediate_sum(model.fields_f, identity, config);
        r.notes = (r.notes.empty() ? "" : r.notes + "; ") + std::string("identity matrix");
        reports.push_back(std::move(r));
    }

    if (!model.initial.empty()) {
        reports.push_back(check_compatibility(model, mesh, config));
    }

    return reports;
}

}  // namespace rdmt
