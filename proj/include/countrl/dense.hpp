#pragma once

#include <Eigen/Dense>

namespace countrl {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Mat = MatrixX<double>;
using Vec = VectorX<double>;

// Numerically stable softmax of a logit vector (or expression).
template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits) {
    using Scalar = typename Derived::Scalar;
    VectorX<Scalar> shifted = logits.derived();
    shifted.array() -= shifted.maxCoeff();
    VectorX<Scalar> exps = shifted.array().exp().matrix();
    return exps / exps.sum();
}

template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& logits) {
    using Scalar = typename Derived::Scalar;
    VectorX<Scalar> v = logits.derived();
    const Scalar m = v.maxCoeff();
    return m + std::log((v.array() - m).exp().sum());
}

// Index of the largest coefficient; ties break toward the lowest index.
template <typename Derived>
int argmax_lowest(const Eigen::MatrixBase<Derived>& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i) {
        if (v(i) > v(best)) best = i;
    }
    return best;
}

}  // namespace countrl
