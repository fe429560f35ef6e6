#ifndef SKGIBBS_PARAMS_HPP
#define SKGIBBS_PARAMS_HPP

#include <cmath>
#include <stdexcept>

namespace skgibbs {

/// Inverse temperature and external field.
struct ModelParams {
    double beta = 0.0;
    double h = 0.0;

    void validate() const {
        if (!std::isfinite(beta) || !std::isfinite(h))
            throw std::invalid_argument("ModelParams: beta and h must be finite");
        if (beta < 0.0) throw std::invalid_argument("ModelParams: beta must be >= 0");
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

}  // namespace skgibbs

#endif  // SKGIBBS_PARAMS_HPP
