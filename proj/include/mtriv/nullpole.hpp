// Right null-pole calculus: 0-admissible Sylvester data sets, the singular
// subspace membership test, adjoints, similarity, simple null-pole data, and
// local interpolation verification for meromorphic matrix maps.
//
// A Sylvester data set ((Bz, Az), (Api, Cpi), S) encodes local zero structure
// through the right null pair (Bz, Az), local pole structure through the left
// pole pair (Api, Cpi), and their coupling S, subject to
//   Api S - S Az = Cpi Bz
// with both Az and Api nilpotent, (Api, Cpi) controllable, (Bz, Az) observable.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mtriv/maps.hpp"
#include "mtriv/numerics.hpp"
#include "mtriv/theta.hpp"
#include "mtriv/torus.hpp"

namespace mtriv {

struct SylvesterDataSet {
    int r = 1;  // matrix-function size the set refers to
    Mat Bz;     // r x nz
    Mat Az;     // nz x nz
    Mat Api;    // np x np
    Mat Cpi;    // np x r
    Mat S;      // np x nz

    int nullSize() const { return int(Az.rows()); }
    int poleSize() const { return int(Api.rows()); }
    bool trivial() const { return nullSize() == 0 && poleSize() == 0; }

    static SylvesterDataSet empty(int r);
    static SylvesterDataSet nullOnly(const Col& x);             // ((x, 0), -, -)
    static SylvesterDataSet poleOnly(const Row& yT);            // (-, (0, y^T), -)
    static SylvesterDataSet make(int r, Mat Bz, Mat Az, Mat Api, Mat Cpi, Mat S);
};

struct AdmissibilityReport {
    bool ok = false;
    std::string failure;  // names the first failed condition, empty when ok
    double sylvesterResidual = 0.0;
};

AdmissibilityReport isAdmissible(const SylvesterDataSet& T,
                                 const Tolerances& tol = Tolerances::defaults());

// ((Cpi^T, Api^T), (Az^T, Bz^T), -S^T). An involution on admissible sets.
SylvesterDataSet adjoint(const SylvesterDataSet& T);

// ((Bz U, U^{-1} Az U), (V^{-1} Api V, V^{-1} Cpi), V^{-1} S U).
SylvesterDataSet similarity(const SylvesterDataSet& T, const Mat& U, const Mat& V);

// Simple null-pole data: N zeros (z_i, x_i) and N poles (w_i, y_i), the 2N
// points pairwise distinct on the torus, all vectors nonzero.
struct SimpleNullPoleData {
    struct Zero {
        TorusPoint at;
        Col x;
    };
    struct Pole {
        TorusPoint at;
        Col y;
    };
    std::vector<Zero> zeros;
    std::vector<Pole> poles;

    int count() const { return int(zeros.size()); }
    void validate(const EllipticCurve& curve, double tol = 1e-9) const;
};

// Tag each data point with a singleton Sylvester set: a zero carries the null
// pair (x_i, 0), a pole carries the pole pair (0, y_i^T).
std::vector<std::pair<TorusPoint, SylvesterDataSet>> simpleToDivisorEntries(
    const SimpleNullPoleData& d, int r);

// A meromorphic row germ near q0, evaluable off the singularity, with a known
// bound on the pole order there.
struct RowGerm {
    std::function<Row(Complex)> eval;
    int poleOrderBound = 1;
};

struct MembershipReport {
    bool member = false;
    Row x;                    // matched pole coefficient vector (1 x np)
    double matchResidual = 0; // principal-part match residual
    double holoResidual = 0;  // largest leftover negative coefficient of h0
    double couplingResidual = 0;  // |x S - res[h0 Bz (zI-Az)^{-1}]|
    std::string diagnostic;
};

// Singular-subspace membership of h at q0 for the data set T: h must equal
// x (zI - Api)^{-1} Cpi + h0 with h0 holomorphic and
// x S = res_{q0}[ h0(q) Bz (z(q) I - Az)^{-1} ].
// The local coordinate is z(u) = u - q0.
MembershipReport membership(const RowGerm& h, const SylvesterDataSet& T, Complex q0,
                            double contourRadius = 0.1,
                            const Tolerances& tol = Tolerances::defaults());

struct SimpleStructureReport {
    bool ok = false;
    std::vector<std::string> failures;
    double maxSecondOrderCoeff = 0.0;  // largest order-(-2) Laurent coefficient at a pole
    double maxKernelResidual = 0.0;    // largest |F(z_i) x_i| / scale
};

// Conditions for F to interpolate the simple data d:
//  (1) det F has divisor sum z_i - sum w_i (windings on an offset fundamental
//      parallelogram and small circles),
//  (2) only simple poles, located at the w_i,
//  (3) x_i spans the right kernel of F(z_i),
//  (4) y_i^T spans the left kernel of F^{-1} at w_i and y_i^T res_{w_i} F != 0
//      with a rank-1 residue.
SimpleStructureReport checkSimpleStructure(const MeromorphicMatrixMap& F,
                                           const SimpleNullPoleData& d,
                                           const EllipticCurve& curve,
                                           const Tolerances& tol = Tolerances::defaults());

struct LocalInterpolationReport {
    bool ok = false;
    std::vector<std::string> failures;
    double rowResidual = 0.0;
    double nullCancelResidual = 0.0;
    double poleCancelResidual = 0.0;
    int winding = 0;
};

// Local interpolation of the data set T by F at q0:
//  (i)   every row of F lies in the singular subspace of T at q0,
//  (ii)  F(q) Bz (zI - Az)^{-1} continues holomorphically across q0,
//  (iii) (zI - Api)^{-1} Cpi F(q)^{-1} continues holomorphically across q0,
//  (iv)  the winding of det F about q0 is nz - np.
// The cancellation checks (ii)/(iii) are exact only when the point decouples
// (S = 0, or one of the pairs is empty): membership of the rows forces a
// coupling residue x S into F Bz (zI - Az)^{-1}, so at a coupled point those
// residues are nonzero for the correct data set. Pass cancellationChecks =
// false there and rely on (i) and (iv).
LocalInterpolationReport verifyLocalInterpolation(const MeromorphicMatrixMap& F,
                                                  const SylvesterDataSet& T, Complex q0,
                                                  double contourRadius = 0.1,
                                                  const Tolerances& tol = Tolerances::defaults(),
                                                  bool cancellationChecks = true);

// Analytic continuation of F^{-1} to q0 (where F may have a pole): the k = 0
// Laurent coefficient of u -> F(u)^{-1} about q0.
Mat inverseAt(const MeromorphicMatrixMap& F, Complex q0, double radius, int nodes = 128);

}  // namespace mtriv
