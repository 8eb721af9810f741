#ifndef CENTROPY_TYPES_HPP
#define CENTROPY_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "centropy/errors.hpp"

namespace centropy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One layer's recorded outputs: rows are samples, columns are neurons.
struct ActivationMatrix {
    Matrix values;  // s x n
    int layer_id = 0;
    int epoch = 0;

    Eigen::Index samples() const { return values.rows(); }
    Eigen::Index neurons() const { return values.cols(); }

    void validate() const {
        if (values.rows() < 2)
            throw ParameterError("ActivationMatrix: need at least 2 samples");
        if (!values.allFinite())
            throw ParameterError("ActivationMatrix: non-finite entries");
    }
};

/// Weights between two consecutive layers, columns indexed by target neuron.
struct WeightMatrix {
    Matrix values;  // m x n
    Vector bias;    // n, carried alongside; unused by weight correlation
    int layer_id = 0;
};

struct Dataset {
    enum class Source { IDX, CSV, Synthetic };
    Matrix inputs;            // s x d
    std::vector<int> labels;  // empty when unlabeled
    Source source = Source::Synthetic;
    std::uint64_t seed = 0;

    bool labeled() const { return !labels.empty(); }
    Eigen::Index size() const { return inputs.rows(); }
    Eigen::Index dim() const { return inputs.cols(); }
};

}  // namespace centropy

#endif
