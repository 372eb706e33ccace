// Explicit genus-1 trivializations of flat factors of automorphy.
//
// Two constructions are provided: the theta-block form, whose entries are the
// operators L_j applied to theta and evaluated at u - log(alpha)/(2 pi i), and
// the single-pole form P_r(lambda_a(u)) built from the quasi-periodic
// logarithmic derivative lambda_a and the difference polynomials p_n. On top
// of these sit a universal automorphy verifier, a basis of functions with
// prescribed principal parts at a point, and the inductive rank extension that
// produces trivializations with simple null-pole structure.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mtriv/maps.hpp"
#include "mtriv/nullpole.hpp"
#include "mtriv/theta.hpp"

namespace mtriv {

// f_alpha(u) = theta(u - l_alpha) / theta(u), l_alpha = Log(alpha)/(2 pi i),
// for alpha != 1; the constant function 1 for alpha = 1. Simple zero over
// Delta + l_alpha, simple pole over Delta = (1+tau)/2.
MeromorphicMatrixMap scalarTrivialization(const ThetaEvaluator& ev, Complex alpha);

// The r x r upper-triangular Toeplitz trivialization of the Jordan factor:
// diagonal entries theta(u - l_alpha)/theta(u), superdiagonals L_j[theta]
// evaluated at u - l_alpha over theta(u).
MeromorphicMatrixMap blockThetaTriv(const ThetaEvaluator& ev, Complex alpha, int r);

// lambda_a(u) = -(1/2 pi i) theta'(u-a-(1+tau)/2) / theta(u-a-(1+tau)/2).
// Simple poles over a; lambda_a(u+1) = lambda_a(u), lambda_a(u+tau) =
// lambda_a(u) + 1. Residue at the pole is -1/(2 pi i).
Complex lambdaA(const ThetaEvaluator& ev, Complex a, Complex u);
Complex lambdaADeriv(const ThetaEvaluator& ev, Complex a, Complex u, int k);

// Coefficients (ascending) of p_n(u) = (alpha^{-n}/n!) (u-(n-1))...(u-1)u,
// p_0 = 1. These satisfy p_{n+1}(u+1) - p_{n+1}(u) = alpha^{-1} p_n(u).
std::vector<Complex> pnPoly(Complex alpha, int n);
Complex evalPoly(const std::vector<Complex>& coeffs, Complex x);

// G_r(u) = P_r(lambda_a(u)), the unipotent upper-triangular Toeplitz matrix of
// p_0, ..., p_{r-1}. Satisfies G_r(u+1) = G_r(u) and
// G_r(u+tau) = alpha^{-1} J_alpha G_r(u).
MeromorphicMatrixMap singlePoleTriv(const ThetaEvaluator& ev, Complex alpha, int r, Complex a);

// Max over sampled points (poles avoided by margin) of the relative residuals
// ||F(u+1) - F(u)|| and ||F(u+tau) - V F(u)||.
double verifyAutomorphy(const MeromorphicMatrixMap& F, const FlatFactor& factor,
                        const EllipticCurve& curve, int samples, std::uint64_t seed);

// Functions s_k with s_k(u + m + n tau) = alpha^n s_k(u) and principal part
// exactly (u - center)^{-k} at the center. For alpha != 1 each s_k has its
// only pole over the center; for alpha = 1 the k = 1 member needs a second
// simple pole, placed at auxiliaryPole.
struct PrincipalPartBasis {
    std::vector<MeromorphicMatrixMap> s;  // s[k-1] has principal part z^{-k}
    Complex center;
    Complex auxiliaryPole;  // meaningful only for alpha = 1
    std::string notes;      // degeneracy handling, if any
};
PrincipalPartBasis principalPartBasis(const ThetaEvaluator& ev, Complex alpha, int kmax,
                                      Complex center = 0.0,
                                      std::optional<Complex> alphaOneAux = {});

// A trivialization bundled with the simple null-pole data it interpolates.
struct TrivializationWithData {
    MeromorphicMatrixMap F;
    SimpleNullPoleData data;
    Complex alpha;
    int rank;
};

// Rank-1 starting point of the induction: f_alpha with its one zero and one
// pole for alpha != 1, the constant 1 with empty data for alpha = 1.
TrivializationWithData baseTrivialization(const ThetaEvaluator& ev, Complex alpha);

// One inductive step r -> r+1: F_{r+1} = [[s_0, s_{r+1} + p S_r], [0, F_r]]
// with s_0 carrying the fresh zero/pole pair(s) and s_{r+1} chosen to remove
// the poles introduced at the distinguished point a = 0 and at the previous
// pole points. Adds one zero/pole pair for alpha != 1 and two for alpha = 1.
TrivializationWithData extendTrivialization(const ThetaEvaluator& ev,
                                            const TrivializationWithData& Fr, Complex alpha,
                                            std::uint64_t seed = 7);

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mtriv
