#pragma once

#include <Eigen/Dense>
#include <limits>

#include "types.hpp"

namespace shallowcv {

/// LU factorization with a reciprocal-condition estimate attached.
template <class Scalar>
struct FactoredMatrix {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Eigen::PartialPivLU<Matrix> lu;
    double condition = std::numeric_limits<double>::infinity();  // 1-norm estimate

    FactoredMatrix() = default;
    explicit FactoredMatrix(const Matrix& a) : lu(a) {
        const double rc = lu.rcond();
        condition = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    }

    [[nodiscard]] bool singular() const { return !(condition < 1e15); }
    [[nodiscard]] Vector solve(const Vector& b) const { return lu.solve(b); }
};

}  // namespace shallowcv
