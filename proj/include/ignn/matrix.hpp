#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ignn {

// Dense row-major matrix of doubles. Rows index nodes, columns index signal
// dimensions, so per-column slices are strided views over the flat buffer.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::size_t size() const { return data_.size(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Frobenius norm of (a - b). Shapes must match.
inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b))
        throw std::invalid_argument("frobenius_distance: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a.data()[i] - b.data()[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

inline double frobenius_norm(const Matrix& a) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a.data()[i] * a.data()[i];
    return std::sqrt(acc);
}

}  // namespace ignn
