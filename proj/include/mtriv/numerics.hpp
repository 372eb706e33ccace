// Shared numerical facilities: contour quadrature for Laurent coefficients and
// residues, winding numbers, and the small dense linear-algebra tests used by
// the null-pole calculus (Krylov ranks, nilpotency, Sylvester residual).
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtriv/torus.hpp"

namespace mtriv {

using Mat = Eigen::MatrixXcd;
using Row = Eigen::RowVectorXcd;
using Col = Eigen::VectorXcd;

// Central knob record. Defaults apply everywhere unless a caller overrides.
struct Tolerances {
    double lattice = 1e-9;       // point identity in lattice-basis coordinates
    double rankRel = 1e-8;       // singular values below rankRel*sigma_max count as zero
    double svGap = 1e-6;         // sigma_{k+1}/sigma_k below this declares a rank drop
    double nilpotent = 1e-10;    // ||A^n|| guard relative to ||A||^n
    double sylvester = 1e-10;    // Sylvester equation residual
    double coeffZero = 1e-7;     // "this Laurent coefficient is zero", relative
    double membership = 1e-7;    // principal-part matching residual
    double automorphy = 1e-7;    // factor-of-automorphy residual
    double conditionMax = 1e12;  // beyond this a solve is reported indeterminate
    double sideRel = 1e-6;       // side-constraint satisfaction, relative

    static const Tolerances& defaults() {
        static const Tolerances t{};
        return t;
    }
};

struct ContourError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ContourSpec {
    Complex center;
    double radius = 0.1;
    int nodes = 128;
};

using ScalarFn = std::function<Complex(Complex)>;
using MatrixFn = std::function<Mat(Complex)>;

// (1/2 pi i) \oint f(z) (z - c)^{-k-1} dz by the trapezoidal rule, i.e. the
// k-th Laurent coefficient of f about the contour center.
Complex laurentCoefficient(const ScalarFn& f, const ContourSpec& spec, int k);
Mat laurentCoefficient(const MatrixFn& f, const ContourSpec& spec, int k);

struct CheckedCoefficient {
    Complex value;
    double error;  // node-doubling discrepancy
};
// Same, with a node-doubling consistency estimate. Throws ContourError when the
// two resolutions disagree beyond tol (relative to the contour scale of f).
CheckedCoefficient laurentCoefficientChecked(const ScalarFn& f, const ContourSpec& spec, int k,
                                             double tol = 1e-8);

inline Complex residue(const ScalarFn& f, const ContourSpec& spec) {
    return laurentCoefficient(f, spec, -1);
}
inline Mat residue(const MatrixFn& f, const ContourSpec& spec) {
    return laurentCoefficient(f, spec, -1);
}

// Winding number (1/2 pi i) \oint f'/f dz on a circular contour; f must be
// zero-free on the path. Throws if f comes near zero on the path or the
// integral strays more than 0.1 from an integer.
int windingNumber(const ScalarFn& f, const ContourSpec& spec);

// Same integral along a closed polyline (last vertex joins the first).
int windingNumberPath(const ScalarFn& f, const std::vector<Complex>& vertices, int nodesPerEdge = 256);

// Krylov rank of the input pair (A, C): rank [C, AC, ..., A^{n-1}C].
int controllabilityRank(const Mat& A, const Mat& C, double rankRel = Tolerances::defaults().rankRel);
// Krylov rank of the output pair (B, A): rank [B; BA; ...; BA^{n-1}].
int observabilityRank(const Mat& B, const Mat& A, double rankRel = Tolerances::defaults().rankRel);

// Least n >= 0 with ||A^n|| below guard*max(1, ||A||^n); -1 if A is not
// nilpotent to the guard.
int nilpotencyIndex(const Mat& A, double guard = Tolerances::defaults().nilpotent);

// ||Api S - S Az - Cpi Bz||. S is data, not solved for: with both spectra {0}
// the Sylvester equation has no uniqueness, so only the residual is meaningful.
double sylvesterResidual(const Mat& Api, const Mat& Az, const Mat& Cpi, const Mat& Bz, const Mat& S);

// Numerical rank of M with the singular-value threshold rankRel*sigma_max.
int numericalRank(const Mat& M, double rankRel = Tolerances::defaults().rankRel);

// Half the distance from center to the nearest lattice translate of any point
// in `others`, capped. Used to pick contour radii that clear all singularities
// except the target.
double clearRadius(const EllipticCurve& curve, Complex center, const std::vector<Complex>& others,
                   double cap = 0.1);

}  // namespace mtriv
