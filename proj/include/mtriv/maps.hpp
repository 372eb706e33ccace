// Flat factors of automorphy and evaluable meromorphic matrix maps. A flat
// factor is normalized so the period-1 action is the identity and the
// period-tau action is an invertible matrix V given through its Jordan data.
#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mtriv/numerics.hpp"
#include "mtriv/torus.hpp"

namespace mtriv {

struct JordanBlockSpec {
    Complex alpha;
    int size = 1;
};

class FlatFactor {
public:
    explicit FlatFactor(std::vector<JordanBlockSpec> blocks, std::optional<Mat> similarity = {});

    static FlatFactor scalar(Complex alpha) { return FlatFactor({{alpha, 1}}); }
    static FlatFactor jordan(Complex alpha, int size) { return FlatFactor({{alpha, size}}); }
    static FlatFactor identity(int r);

    int rank() const { return rank_; }
    const std::vector<JordanBlockSpec>& blocks() const { return blocks_; }
    const std::optional<Mat>& similarity() const { return similarity_; }

    // V: the action of the deck translation by tau.
    Mat monodromy() const;
    // Action of the deck translation by m + n*tau, i.e. V^n.
    Mat action(long n) const;

private:
    std::vector<JordanBlockSpec> blocks_;
    std::optional<Mat> similarity_;
    int rank_ = 0;
};

struct DeclaredPole {
    TorusPoint at;
    int maxOrder = 1;
};

class MeromorphicMatrixMap {
public:
    using Evaluator = std::function<Mat(Complex)>;

    MeromorphicMatrixMap(int rows, int cols, Evaluator eval, std::vector<DeclaredPole> poles = {},
                         std::optional<FlatFactor> factor = {})
        : rows_(rows), cols_(cols), eval_(std::move(eval)), poles_(std::move(poles)),
          factor_(std::move(factor)) {}

    static MeromorphicMatrixMap scalarMap(std::function<Complex(Complex)> f,
                                          std::vector<DeclaredPole> poles = {},
                                          std::optional<FlatFactor> factor = {});
    static MeromorphicMatrixMap constant(const Mat& value);

    Mat operator()(Complex u) const { return eval_(u); }
    Complex scalarAt(Complex u) const { return eval_(u)(0, 0); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<DeclaredPole>& declaredPoles() const { return poles_; }
    const std::optional<FlatFactor>& factor() const { return factor_; }

private:
    int rows_, cols_;
    Evaluator eval_;
    std::vector<DeclaredPole> poles_;
    std::optional<FlatFactor> factor_;
};

}  // namespace mtriv
