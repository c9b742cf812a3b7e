#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rdmt/poly.hpp"

namespace rdmt {

/// Full problem statement: component count, diffusion constants, interior
/// reaction fields F, boundary flux fields G, and initial data. Immutable in
/// practice; all consumers take it by const reference.
struct VectorFieldModel {
    std::size_t m = 0;
    std::vector<double> d;            // diffusion constants, one per component
    std::vector<MultiPoly> fields_f;  // m polynomials in m variables
    std::vector<MultiPoly> fields_g;  // m polynomials in m variables
    std::vector<MultiPoly> initial;   // m polynomials in the spatial variables
    std::map<std::string, Rational> constants;

    /// Throws std::invalid_argument when sizes or signs are inconsistent.
    void validate() const;
};

}  // namespace rdmt
