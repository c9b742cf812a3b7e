#include "rdmt/model.hpp"

#include <stdexcept>

namespace rdmt {

void VectorFieldModel::validate() const {
    if (m < 1) throw std::invalid_argument("model needs at least one component");
    if (d.size() != m || fields_f.size() != m || fields_g.size() != m) {
        throw std::invalid_argument("model sequences must all have length m");
    }
    for (double di : d) {
        if (!(di > 0.0)) throw std::invalid_argument("diffusion constants must be positive");
    }
    for (const auto& p : fields_f) {
        if (p.num_vars() != m) throw std::invalid_argument("F field dimension mismatch");
    }
    for (const auto& p : fields_g) {
        if (p.num_vars() != m) throw std::invalid_argument("G field dimension mismatch");
    }
    if (!initial.empty() && initial.size() != m) {
        throw std::invalid_argument("initial data must have one entry per component");
    }
}

}  // namespace rdmt
