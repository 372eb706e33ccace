#pragma once

#include <complex>
#include <random>

#include "mtriv/numerics.hpp"
#include "mtriv/torus.hpp"

namespace mtriv::testing {

inline EllipticCurve squareCurve() { return EllipticCurve(Complex(0.0, 1.0)); }

// Random point in the open fundamental parallelogram, margins kept from the
// boundary so lattice translates stay unambiguous.
inline Complex randomPoint(const EllipticCurve& curve, std::mt19937_64& rng, double lo = 0.08,
                           double hi = 0.92) {
    std::uniform_real_distribution<double> uni(lo, hi);
    return curve.fromLatticeCoords(uni(rng), uni(rng));
}

inline Complex randomPointAway(const EllipticCurve& curve, std::mt19937_64& rng,
                               const std::vector<Complex>& avoid, double margin = 0.1) {
    for (int t = 0; t < 512; ++t) {
        Complex p = randomPoint(curve, rng);
        bool ok = true;
        for (Complex q : avoid)
            if (curve.latticeDistance(p, q) < margin) ok = false;
        if (ok) return p;
    }
    throw std::runtime_error("randomPointAway: could not place a point");
}

inline Mat randomMatrix(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> uni(-scale, scale);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(uni(rng), uni(rng));
    return m;
}

}  // namespace mtriv::testing
