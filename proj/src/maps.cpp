#include "mtriv/maps.hpp"

#include <Eigen/LU>
#include <stdexcept>

namespace mtriv {

FlatFactor::FlatFactor(std::vector<JordanBlockSpec> blocks, std::optional<Mat> similarity)
    : blocks_(std::move(blocks)), similarity_(std::move(similarity)) {
    for (const auto& b : blocks_) {
        if (b.size < 1) throw std::invalid_argument("FlatFactor: block size must be positive");
        if (b.alpha == Complex(0.0)) throw std::invalid_argument("FlatFactor: alpha must be nonzero");
        rank_ += b.size;
    }
    if (similarity_) {
        if (similarity_->rows() != rank_ || similarity_->cols() != rank_)
            throw std::invalid_argument("FlatFactor: similarity size mismatch");
        Eigen::FullPivLU<Mat> lu(*similarity_);
        if (!lu.isInvertible()) throw std::invalid_argument("FlatFactor: similarity not invertible");
    }
}

FlatFactor FlatFactor::identity(int r) {
    std::vector<JordanBlockSpec> blocks(r, JordanBlockSpec{Complex(1.0), 1});
    return FlatFactor(blocks);
}

Mat FlatFactor::monodromy() const {
    Mat J = Mat::Zero(rank_, rank_);
    int off = 0;
    for (const auto& b : blocks_) {
        for (int i = 0; i < b.size; ++i) {
            J(off + i, off + i) = b.alpha;
            if (i + 1 < b.size) J(off + i, off + i + 1) = 1.0;
        }
        off += b.size;
    }
    if (similarity_) return (*similarity_) * J * similarity_->inverse();
    return J;
}

Mat FlatFactor::action(long n) const {
    Mat V = monodromy();
    Mat P = Mat::Identity(rank_, rank_);
    if (n >= 0) {
        for (long i = 0; i < n; ++i) P *= V;
    } else {
        Mat W = V.inverse();
        for (long i = 0; i < -n; ++i) P *= W;
    }
    return P;
}

MeromorphicMatrixMap MeromorphicMatrixMap::scalarMap(std::function<Complex(Complex)> f,
                                                     std::vector<DeclaredPole> poles,
                                                     std::optional<FlatFactor> factor) {
    auto eval = [f = std::move(f)](Complex u) {
        Mat m(1, 1);
        m(0, 0) = f(u);
        return m;
    };
    return MeromorphicMatrixMap(1, 1, eval, std::move(poles), std::move(factor));
}

MeromorphicMatrixMap MeromorphicMatrixMap::constant(const Mat& value) {
    return MeromorphicMatrixMap(int(value.rows()), int(value.cols()),
                                [value](Complex) { return value; });
}

}  // namespace mtriv
