#include "mtriv/numerics.hpp"

#include <cmath>

namespace mtriv {

namespace {

// Trapezoidal rule on the circle. Spectrally accurate for integrands analytic
// in an annulus around the path.
template <typename Value, typename Fn>
Value contourSum(const Fn& f, const ContourSpec& spec, int k, int nodes) {
    Value acc{};
    bool first = true;
    for (int j = 0; j < nodes; ++j) {
        double phi = 2.0 * kPi * j / nodes;
        Complex w = std::polar(1.0, phi);
        Complex z = spec.center + spec.radius * w;
        // f(z) * (z-c)^{-k} averaged over nodes; the dz/(2 pi i (z-c)) factor
        // reduces to 1/nodes on the uniform grid.
        Complex scale = std::pow(Complex(spec.radius) * w, -k);
        Value term = f(z) * scale;
        if (first) {
            acc = term;
            first = false;
        } else {
            acc += term;
        }
    }
    return acc / double(nodes);
}

}  // namespace

Complex laurentCoefficient(const ScalarFn& f, const ContourSpec& spec, int k) {
    if (spec.radius <= 0.0) throw std::invalid_argument("laurentCoefficient: radius must be positive");
    if (spec.nodes < 8) throw std::invalid_argument("laurentCoefficient: too few nodes");
    return contourSum<Complex>(f, spec, k, spec.nodes);
}

Mat laurentCoefficient(const MatrixFn& f, const ContourSpec& spec, int k) {
    if (spec.radius <= 0.0) throw std::invalid_argument("laurentCoefficient: radius must be positive");
    if (spec.nodes < 8) throw std::invalid_argument("laurentCoefficient: too few nodes");
    return contourSum<Mat>(f, spec, k, spec.nodes);
}

CheckedCoefficient laurentCoefficientChecked(const ScalarFn& f, const ContourSpec& spec, int k,
                                             double tol) {
    Complex coarse = contourSum<Complex>(f, spec, k, spec.nodes);
    Complex fine = contourSum<Complex>(f, spec, k, 2 * spec.nodes);
    double err = std::abs(fine - coarse);
    // Scale by the size of f on the contour so the check is meaningful for
    // large and small integrands alike.
    double scale = 0.0;
    for (int j = 0; j < 8; ++j) {
        Complex z = spec.center + spec.radius * std::polar(1.0, 2.0 * kPi * j / 8.0);
        scale = std::max(scale, std::abs(f(z)) * std::pow(spec.radius, -k));
    }
    scale = std::max(scale, 1.0);
    if (err > tol * scale)
        throw ContourError("laurentCoefficientChecked: node doubling changed the result by " +
                           std::to_string(err) + "; contour unreliable");
    return {fine, err};
}

namespace {

// Winding integral along a parameterized closed path given as samples z_j.
// f'/f is integrated with f' from small-step central differences; the result
// is cross-checked by phase continuation (which computes the same integral by
// tracking a continuous branch of log f).
int windingFromSamples(const ScalarFn& f, const std::vector<Complex>& zs) {
    const size_t n = zs.size();
    std::vector<Complex> fv(n);
    double scale = 0.0;
    for (size_t j = 0; j < n; ++j) {
        fv[j] = f(zs[j]);
        scale = std::max(scale, std::abs(fv[j]));
    }
    for (size_t j = 0; j < n; ++j) {
        if (std::abs(fv[j]) < 1e-12 * scale)
            throw ContourError("windingNumber: |f| vanishes on the contour; indent the path");
    }
    // Quadrature of f'/f.
    Complex integral = 0.0;
    for (size_t j = 0; j < n; ++j) {
        size_t jp = (j + 1) % n, jm = (j + n - 1) % n;
        Complex dz = 0.5 * (zs[jp] - zs[jm]);
        double h = 1e-6 * std::max(1.0, std::abs(zs[j]));
        Complex fp = (f(zs[j] + h) - f(zs[j] - h)) / (2.0 * h);
        integral += fp / fv[j] * dz;
    }
    double quadWinding = (integral / kTwoPiI).real();
    // Phase continuation: sum of branch-tracked argument increments.
    double totalArg = 0.0;
    for (size_t j = 0; j < n; ++j) {
        size_t jp = (j + 1) % n;
        double d = std::arg(fv[jp] / fv[j]);
        if (std::abs(d) > 0.5 * kPi)
            throw ContourError("windingNumber: contour too coarse for phase tracking");
        totalArg += d;
    }
    double phaseWinding = totalArg / (2.0 * kPi);
    long rounded = std::lround(phaseWinding);
    if (std::abs(phaseWinding - double(rounded)) > 0.1 ||
        std::abs(quadWinding - double(rounded)) > 0.1)
        throw ContourError("windingNumber: integral not close to an integer (" +
                           std::to_string(quadWinding) + ")");
    return int(rounded);
}

}  // namespace

int windingNumber(const ScalarFn& f, const ContourSpec& spec) {
    std::vector<Complex> zs(spec.nodes);
    for (int j = 0; j < spec.nodes; ++j)
        zs[j] = spec.center + spec.radius * std::polar(1.0, 2.0 * kPi * j / spec.nodes);
    return windingFromSamples(f, zs);
}

int windingNumberPath(const ScalarFn& f, const std::vector<Complex>& vertices, int nodesPerEdge) {
    if (vertices.size() < 3) throw std::invalid_argument("windingNumberPath: need a closed polygon");
    std::vector<Complex> zs;
    zs.reserve(vertices.size() * nodesPerEdge);
    for (size_t e = 0; e < vertices.size(); ++e) {
        Complex a = vertices[e];
        Complex b = vertices[(e + 1) % vertices.size()];
        for (int j = 0; j < nodesPerEdge; ++j) zs.push_back(a + (b - a) * (double(j) / nodesPerEdge));
    }
    return windingFromSamples(f, zs);
}

int numericalRank(const Mat& M, double rankRel) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    double cut = rankRel * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return rank;
}

int controllabilityRank(const Mat& A, const Mat& C, double rankRel) {
    const int n = int(A.rows());
    if (n == 0) return 0;
    Mat krylov(n, n * C.cols());
    Mat block = C;
    for (int j = 0; j < n; ++j) {
        krylov.middleCols(j * C.cols(), C.cols()) = block;
        block = A * block;
    }
    return numericalRank(krylov, rankRel);
}

int observabilityRank(const Mat& B, const Mat& A, double rankRel) {
    const int n = int(A.rows());
    if (n == 0) return 0;
    Mat krylov(n * B.rows(), n);
    Mat block = B;
    for (int j = 0; j < n; ++j) {
        krylov.middleRows(j * B.rows(), B.rows()) = block;
        block = block * A;
    }
    return numericalRank(krylov, rankRel);
}

int nilpotencyIndex(const Mat& A, double guard) {
    const int n = int(A.rows());
    if (n == 0) return 0;
    double base = std::max(1.0, A.norm());
    Mat power = Mat::Identity(n, n);
    double powScale = 1.0;
    for (int k = 0; k <= n; ++k) {
        if (power.norm() <= guard * std::max(1.0, powScale)) return k;
        power = power * A;
        powScale *= base;
    }
    return -1;
}

double sylvesterResidual(const Mat& Api, const Mat& Az, const Mat& Cpi, const Mat& Bz, const Mat& S) {
    if (Api.rows() != S.rows() || Az.rows() != S.cols())
        throw std::invalid_argument("sylvesterResidual: inconsistent shapes");
    if (S.rows() == 0 || S.cols() == 0) {
        // Degenerate shapes: the equation reduces to Cpi*Bz = 0 over an empty
        // index set, which holds vacuously.
        return 0.0;
    }
    Mat res = Api * S - S * Az - Cpi * Bz;
    return res.norm();
}

double clearRadius(const EllipticCurve& curve, Complex center, const std::vector<Complex>& others,
                   double cap) {
    double best = cap;
    for (Complex o : others) {
        double d = curve.latticeDistance(center, o);
        // latticeDistance is in basis coordinates; convert conservatively to
        // an absolute bound using the shorter basis direction.
        double unit = std::min(1.0, std::abs(curve.tau()));
        best = std::min(best, 0.45 * d * unit);
    }
    if (best < 1e-4)
        throw ContourError("clearRadius: singular points too close together for a reliable contour");
    return best;
}

}  // namespace mtriv
