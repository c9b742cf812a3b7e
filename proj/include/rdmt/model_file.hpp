#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdmt/conditions.hpp"
#include "rdmt/mesh.hpp"
#include "rdmt/model.hpp"
#include "rdmt/solver.hpp"

namespace rdmt {

struct DomainSpec {
    int dim = 1;
    double lx = 1.0;
    double ly = 1.0;
    std::size_t nx = 200;
    std::size_t ny = 2;
};

struct DiagnosticsSpec {
    std::vector<double> p_list;   // defaults to {1, 2, inf}
    std::vector<Rational> b;      // defaults to all ones
    unsigned lyapunov_order = 2;
    bool lyapunov_requested = false;
    bool theta_auto = true;
    std::vector<Rational> theta;  // used when theta_auto is false
};

class ModelFileError : public std::runtime_error {
public:
    ModelFileError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Parsed model file: a line-oriented key = value format with [section]
/// headers ([model], [constants], [domain], [initial], [solver],
/// [diagnostics]); see the README for the grammar. Field expressions are
/// parsed with the constants table resolved, so models are stored fully
/// numeric.
struct ModelFile {
    VectorFieldModel model;
    DomainSpec domain;
    SolverConfig solver;
    DiagnosticsSpec diagnostics;
    std::string source_text;

    static ModelFile parse(const std::string& text);
    /// Re-parses with some named constants replaced (parameter sweeps).
    /// Throws ModelFileError when an override names an undefined constant.
    static ModelFile parse(const std::string& text,
                           const std::map<std::string, Rational>& constant_overrides);

    Mesh build_mesh() const;
    /// FNV-1a hash of the source text, as fixed-width hex.
    std::string hash() const;
};

std::vector<std::string> preset_names();

/// Model file text for a built-in preset (example1 .. example4). Throws
/// std::invalid_argument listing the valid names on an unknown preset.
std::string preset_text(const std::string& name);

/// The full condition sweep used by the check command and run summaries.
std::vector<ConditionReport> standard_checks(const ModelFile& mf, const Mesh& mesh,
                                             const CheckConfig& config = {});

}  // namespace rdmt
