// The coupling-matrix machinery for interpolation with prescribed null-pole
// data on the torus: assembly of the block matrix Gamma from residues of the
// canonical functions, the row membership test, section counting, construction
// of candidate interpolants, the single-valued (first) and flat-factor
// (second) solvers, the genus-0 Cauchy-matrix baseline, and the scalar
// Abel/Fay verification suite.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mtriv/divisors.hpp"
#include "mtriv/kernels.hpp"
#include "mtriv/maps.hpp"
#include "mtriv/theta.hpp"

namespace mtriv {

class GammaSystem {
public:
    GammaSystem(const ThetaEvaluator& ev, const MatrixDivisor& D, const BaseDivisor& d0,
                const Tolerances& tol = Tolerances::defaults());

    const EllipticCurve& curve() const { return fam_->curve(); }
    const MatrixDivisor& divisor() const { return divisor_; }
    const BaseDivisor& baseDivisor() const { return d0_; }
    const CanonicalFunctions& canonical() const { return *fam_; }

    // Entry indices of the divisor forming the block rows (pole part present)
    // and block columns (zero part present), in I,II / II,III order.
    const std::vector<int>& rowEntries() const { return rowEntries_; }
    const std::vector<int>& colEntries() const { return colEntries_; }
    int rowOffset(int k) const { return rowOffset_[size_t(k)]; }
    int colOffset(int k) const { return colOffset_[size_t(k)]; }

    const Mat& gamma() const { return gamma_; }
    const Mat& residueAtBase() const { return R_; }  // block column of res_{p1}[f C]
    const Mat& bzRow() const { return BzRow_; }
    const Mat& cpiCol() const { return CpiCol_; }

    // Block-diagonal matrix of the f_{u_i, Api_i}(u) over the row entries.
    Mat diagEval(Complex u) const;

    // Independent evaluation of one Gamma block by raw contour quadrature,
    // with a caller-chosen radius scale and node count.
    Mat blockByContour(int rowIdx, int colIdx, double radiusScale = 1.0, int nodes = 256) const;

    int totalPoleSize() const { return nP_; }
    int totalNullSize() const { return nZ_; }

private:
    Mat assembleBlock(int rowIdx, int colIdx, bool analyticWherePossible) const;

    std::shared_ptr<CanonicalFunctions> fam_;
    MatrixDivisor divisor_;
    BaseDivisor d0_;
    std::vector<int> rowEntries_, colEntries_;
    std::vector<int> rowOffset_, colOffset_;
    int nP_ = 0, nZ_ = 0;
    Mat gamma_, R_, BzRow_, CpiCol_;
    Tolerances tol_;
};

GammaSystem buildGamma(const ThetaEvaluator& ev, const MatrixDivisor& D, const BaseDivisor& d0,
                       const Tolerances& tol = Tolerances::defaults());

struct RowTestResult {
    bool member = false;
    double residual = 0.0;
};
// u0 Bz = row[u_i] Gamma decides membership of u0 + sum_i u_i f_{u_i,Api} Cpi.
RowTestResult membershipRowTest(const GammaSystem& sys, const Row& u0, const Row& uBlocks,
                                const Tolerances& tol = Tolerances::defaults());

struct SectionCount {
    int count = 0;
    bool certain = true;  // false when the singular-value gap is ambiguous
};
// Dimension of the left kernel of Gamma, by singular-value gap.
SectionCount sectionCount(const GammaSystem& sys, const Tolerances& tol = Tolerances::defaults());

// K = U0 + sum_i U_i f_{u_i, Api_i} Cpi_i with the U_i packed as one r x nP row
// of blocks, in row-entry order.
MeromorphicMatrixMap buildK(const GammaSystem& sys, const Mat& U0, const Mat& Ui);

struct FirstSolveResult {
    enum class Status { Solved, SingularGamma, SideConstraintViolated, Indeterminate };
    Status status = Status::Indeterminate;
    double conditionNumber = 0.0;
    double sideAbs = 0.0;
    double sideRel = 0.0;
    std::optional<MeromorphicMatrixMap> K;
    // Certificate, populated when a solution is returned.
    double periodicityResidual = 0.0;    // double periodicity of K on samples
    double interpolationResidual = 0.0;  // worst local-interpolation residual
    double basePoleResidual = 0.0;       // ||res_{p1} K|| (must vanish)
    bool certified = false;
    std::string note;
};

// Single-valued interpolant: exists iff Gamma is invertible and
// Bz Gamma^{-1} R = 0; then K(u) = U0 (I + Bz Gamma^{-1} F(u) Cpi).
FirstSolveResult solveFirst(const ThetaEvaluator& ev, const MatrixDivisor& D, const BaseDivisor& d0,
                            const Mat& U0, const Tolerances& tol = Tolerances::defaults());

struct SecondSolveResult {
    bool found = false;
    std::optional<BaseDivisor> d0;
    double conditionNumber = 0.0;
    int trialsUsed = 0;
};

// Searches for a base divisor making Gamma invertible. At genus 1 persistent
// failure over many trials is strong evidence of non-existence (reported as
// evidence, not proof).
SecondSolveResult solveSecondExistence(const ThetaEvaluator& ev, const MatrixDivisor& D, int trials,
                                       std::uint64_t seed = 11,
                                       const Tolerances& tol = Tolerances::defaults());

struct Genus0Result {
    std::function<Complex(Complex)> productForm;
    std::function<Complex(Complex)> realizationForm;
    double maxDeviation = 0.0;
};

// Product form prod (z - lambda_i) / prod (z - mu_j) against the realization
// 1 + rowOnes diag((z-mu_j)^{-1}) S^{-1} colOnes with the Cauchy matrix
// S = [1/(mu_j - lambda_i)] (sign calibrated by the N = 1 oracle).
Genus0Result genus0CauchySolve(const std::vector<Complex>& lambdas, const std::vector<Complex>& mus);

// prod_j E(p, lambda_j) / prod_i E(p, mu_i).
Complex primeFormSolution(const PrimeFormEvaluator& E, const std::vector<Complex>& lambdas,
                          const std::vector<Complex>& mus, Complex p);

struct FayReport {
    int n = 0;
    bool abelHolds = false;
    double fayRelError = 0.0;           // |det M - closed form| / |closed form|
    double gammaInverseEntryError = 0;  // numeric Gamma^{-1} vs closed-form entries
    double interpIdentityResidual = 0;  // product-vs-realization identity on probes
    double residueMatchError = 0.0;     // residue matching in the base-point variable
    double detGamma = 0.0;
    double fayCriterion = 0.0;  // |theta(sum mu - sum lambda + be)|
    std::string notes;
};

// Scalar consistency suite for simple data lambda_1..N : mu_1..N and a flat
// line bundle: the theta-kernel determinant against its closed form, the
// closed-form inverse entries, the interpolation identity under the Abel
// condition, and the base-point residue matching.
FayReport scalarAbelFaySuite(const ThetaEvaluator& ev, const std::vector<Complex>& lambdas,
                             const std::vector<Complex>& mus, const FlatLineBundle& bundle,
                             const Tolerances& tol = Tolerances::defaults());

}  // namespace mtriv
