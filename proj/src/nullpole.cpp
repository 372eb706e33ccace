#include "mtriv/nullpole.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace mtriv {

SylvesterDataSet SylvesterDataSet::empty(int r) {
    SylvesterDataSet T;
    T.r = r;
    T.Bz = Mat::Zero(r, 0);
    T.Az = Mat::Zero(0, 0);
    T.Api = Mat::Zero(0, 0);
    T.Cpi = Mat::Zero(0, r);
    T.S = Mat::Zero(0, 0);
    return T;
}

SylvesterDataSet SylvesterDataSet::nullOnly(const Col& x) {
    SylvesterDataSet T = empty(int(x.size()));
    T.Bz = x;
    T.Az = Mat::Zero(1, 1);
    T.S = Mat::Zero(0, 1);
    return T;
}

SylvesterDataSet SylvesterDataSet::poleOnly(const Row& yT) {
    SylvesterDataSet T = empty(int(yT.size()));
    T.Api = Mat::Zero(1, 1);
    T.Cpi = yT;
    T.S = Mat::Zero(1, 0);
    return T;
}

SylvesterDataSet SylvesterDataSet::make(int r, Mat Bz, Mat Az, Mat Api, Mat Cpi, Mat S) {
    SylvesterDataSet T;
    T.r = r;
    T.Bz = std::move(Bz);
    T.Az = std::move(Az);
    T.Api = std::move(Api);
    T.Cpi = std::move(Cpi);
    T.S = std::move(S);
    if (T.Bz.rows() != r || T.Cpi.cols() != r || T.Az.rows() != T.Az.cols() ||
        T.Api.rows() != T.Api.cols() || T.Bz.cols() != T.Az.rows() || T.Cpi.rows() != T.Api.rows() ||
        T.S.rows() != T.Api.rows() || T.S.cols() != T.Az.rows())
        throw std::invalid_argument("SylvesterDataSet: inconsistent block shapes");
    return T;
}

AdmissibilityReport isAdmissible(const SylvesterDataSet& T, const Tolerances& tol) {
    AdmissibilityReport rep;
    if (T.poleSize() > 0) {
        if (nilpotencyIndex(T.Api, tol.nilpotent) < 0) {
            rep.failure = "Api not nilpotent";
            return rep;
        }
        if (controllabilityRank(T.Api, T.Cpi, tol.rankRel) != T.poleSize()) {
            rep.failure = "(Api, Cpi) not controllable";
            return rep;
        }
    }
    if (T.nullSize() > 0) {
        if (nilpotencyIndex(T.Az, tol.nilpotent) < 0) {
            rep.failure = "Az not nilpotent";
            return rep;
        }
        if (observabilityRank(T.Bz, T.Az, tol.rankRel) != T.nullSize()) {
            rep.failure = "(Bz, Az) not observable";
            return rep;
        }
    }
    rep.sylvesterResidual = sylvesterResidual(T.Api, T.Az, T.Cpi, T.Bz, T.S);
    double scale = std::max({1.0, T.Cpi.norm() * T.Bz.norm(), T.S.norm()});
    if (rep.sylvesterResidual > tol.sylvester * scale) {
        rep.failure = "Sylvester equation residual too large";
        return rep;
    }
    rep.ok = true;
    return rep;
}

SylvesterDataSet adjoint(const SylvesterDataSet& T) {
    SylvesterDataSet A;
    A.r = T.r;
    A.Bz = T.Cpi.transpose();
    A.Az = T.Api.transpose();
    A.Api = T.Az.transpose();
    A.Cpi = T.Bz.transpose();
    A.S = -T.S.transpose();
    return A;
}

SylvesterDataSet similarity(const SylvesterDataSet& T, const Mat& U, const Mat& V) {
    Eigen::FullPivLU<Mat> luU(U), luV(V);
    if (U.rows() != T.nullSize() || V.rows() != T.poleSize())
        throw std::invalid_argument("similarity: transform sizes do not match the data set");
    if ((U.size() > 0 && !luU.isInvertible()) || (V.size() > 0 && !luV.isInvertible()))
        throw std::invalid_argument("similarity: transform is singular");
    SylvesterDataSet R;
    R.r = T.r;
    R.Bz = T.Bz * U;
    R.Az = (U.size() > 0) ? Mat(luU.inverse() * T.Az * U) : T.Az;
    R.Api = (V.size() > 0) ? Mat(luV.inverse() * T.Api * V) : T.Api;
    R.Cpi = (V.size() > 0) ? Mat(luV.inverse() * T.Cpi) : T.Cpi;
    Mat S = T.S;
    if (V.size() > 0) S = luV.inverse() * S;
    if (U.size() > 0) S = S * U;
    R.S = S;
    return R;
}

void SimpleNullPoleData::validate(const EllipticCurve& curve, double tol) const {
    if (zeros.size() != poles.size())
        throw std::invalid_argument("SimpleNullPoleData: zero and pole counts differ");
    std::vector<Complex> pts;
    for (const auto& z : zeros) {
        if (z.x.norm() == 0.0) throw std::invalid_argument("SimpleNullPoleData: zero vector x");
        pts.push_back(z.at.rep());
    }
    for (const auto& p : poles) {
        if (p.y.norm() == 0.0) throw std::invalid_argument("SimpleNullPoleData: zero vector y");
        pts.push_back(p.at.rep());
    }
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j)
            if (latticeEquivalent(curve, pts[i], pts[j], tol))
                throw std::invalid_argument("SimpleNullPoleData: support points not distinct");
}

std::vector<std::pair<TorusPoint, SylvesterDataSet>> simpleToDivisorEntries(
    const SimpleNullPoleData& d, int r) {
    std::vector<std::pair<TorusPoint, SylvesterDataSet>> out;
    for (const auto& z : d.zeros) out.emplace_back(z.at, SylvesterDataSet::nullOnly(z.x));
    for (const auto& p : d.poles) out.emplace_back(p.at, SylvesterDataSet::poleOnly(p.y.transpose()));
    for (auto& e : out) e.second.r = r;
    return out;
}

namespace {

// Row-valued Laurent coefficient about q0.
Row rowLaurent(const std::function<Row(Complex)>& f, Complex q0, double radius, int nodes, int k,
               int width) {
    Row acc = Row::Zero(width);
    for (int j = 0; j < nodes; ++j) {
        Complex w = std::polar(1.0, 2.0 * kPi * j / nodes);
        Complex z = q0 + radius * w;
        Complex scale = std::pow(Complex(radius) * w, double(-k));
        acc += f(z) * scale;
    }
    return acc / double(nodes);
}

Mat resolventValue(const Mat& A, Complex z) {
    // (z I - A)^{-1} for nilpotent A via the finite Neumann series.
    const int n = int(A.rows());
    Mat acc = Mat::Zero(n, n);
    Mat power = Mat::Identity(n, n);
    Complex zinv = 1.0 / z;
    Complex zpow = zinv;
    for (int j = 0; j < n; ++j) {
        acc += zpow * power;
        power = power * A;
        zpow *= zinv;
    }
    return acc;
}

}  // namespace

MembershipReport membership(const RowGerm& h, const SylvesterDataSet& T, Complex q0,
                            double contourRadius, const Tolerances& tol) {
    MembershipReport rep;
    const int np = T.poleSize();
    const int nz = T.nullSize();
    const int r = T.r;
    const int depth = std::max({h.poleOrderBound, np, 1});

    // Scale of h on the contour, for relative thresholds. A blow-up on the
    // path means the contour grazes another singularity: shrink once, then
    // give up.
    auto contourScale = [&](double radius) {
        double scale = 1.0;
        for (int j = 0; j < 16; ++j) {
            Complex z = q0 + radius * std::polar(1.0, 2.0 * kPi * j / 16.0);
            scale = std::max(scale, h.eval(z).norm());
        }
        return scale;
    };
    auto contourReliable = [&](double radius) {
        double scale = contourScale(radius);
        if (!std::isfinite(scale) || scale > 1e12) return false;
        // Sentinel: a singularity grazing the path makes the trapezoid rule
        // node-count dependent.
        Row coarse = rowLaurent(h.eval, q0, radius, 128, -1, r);
        Row fine = rowLaurent(h.eval, q0, radius, 256, -1, r);
        return (coarse - fine).norm() <= 1e-6 * std::max(1.0, scale);
    };
    if (!contourReliable(contourRadius)) {
        contourRadius *= 0.5;
        if (!contourReliable(contourRadius))
            throw ContourError("membership: contour hits a singularity even after radius retry");
    }
    double scale = contourScale(contourRadius);

    // Principal part of h: coefficients of (u - q0)^{-m}, m = 1..depth.
    std::vector<Row> neg(depth);
    for (int m = 1; m <= depth; ++m)
        neg[m - 1] = rowLaurent(h.eval, q0, contourRadius, 256, -m, r);

    // Match against the pole pair: coefficient of z^{-m} of x (zI-Api)^{-1} Cpi
    // is x Api^{m-1} Cpi. Solve the stacked least-squares system for x.
    Row x = Row::Zero(np);
    if (np > 0) {
        Mat K(np, depth * r);
        Mat power = Mat::Identity(np, np);
        for (int m = 0; m < depth; ++m) {
            K.middleCols(m * r, r) = power * T.Cpi;
            power = power * T.Api;
        }
        Row target(depth * r);
        for (int m = 0; m < depth; ++m) target.middleCols(m * r, r) = neg[m];
        // min over x of ||x K - target||.
        Eigen::JacobiSVD<Mat> svd(K.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);
        x = svd.solve(target.transpose()).transpose();
        rep.matchResidual = (x * K - target).norm() / scale;
    } else {
        Row target(depth * r);
        for (int m = 0; m < depth; ++m) target.middleCols(m * r, r) = neg[m];
        rep.matchResidual = target.norm() / scale;
    }
    rep.x = x;
    if (rep.matchResidual > tol.membership) {
        rep.diagnostic = "unmatched principal part";
        return rep;
    }

    auto h0 = [&](Complex u) -> Row {
        Row v = h.eval(u);
        if (np > 0) v -= x * resolventValue(T.Api, u - q0) * T.Cpi;
        return v;
    };

    // h0 must be holomorphic at q0.
    double holo = 0.0;
    for (int m = 1; m <= depth; ++m)
        holo = std::max(holo, rowLaurent(h0, q0, contourRadius, 256, -m, r).norm());
    rep.holoResidual = holo / scale;
    if (rep.holoResidual > tol.membership) {
        rep.diagnostic = "regular part not holomorphic after pole removal";
        return rep;
    }

    // Coupling condition: x S = res_{q0}[ h0 Bz (zI - Az)^{-1} ].
    if (nz > 0) {
        auto integrand = [&](Complex u) -> Row { return h0(u) * T.Bz * resolventValue(T.Az, u - q0); };
        Row res = rowLaurent(integrand, q0, contourRadius, 256, -1, nz);
        rep.couplingResidual = (x * T.S - res).norm() / scale;
        if (rep.couplingResidual > tol.membership) {
            rep.diagnostic = "residue coupling condition failed";
            return rep;
        }
    }
    rep.member = true;
    return rep;
}

Mat inverseAt(const MeromorphicMatrixMap& F, Complex q0, double radius, int nodes) {
    auto inv = [&](Complex u) -> Mat { return F(u).inverse(); };
    return laurentCoefficient(MatrixFn(inv), ContourSpec{q0, radius, nodes}, 0);
}

namespace {

// Offset fundamental parallelogram whose boundary stays clear of the given
// points (as torus points). Returns the four corners.
std::vector<Complex> offsetParallelogram(const EllipticCurve& curve, const std::vector<Complex>& pts,
                                         double margin, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.02, 0.35);
    for (int attempt = 0; attempt < 64; ++attempt) {
        double os = -uni(rng), ot = -uni(rng);
        Complex corner = curve.fromLatticeCoords(os, ot);
        bool ok = true;
        for (Complex p : pts) {
            LatticeCoords c = curve.latticeCoords(p - corner);
            double fs = c.s - std::floor(c.s);
            double ft = c.t - std::floor(c.t);
            if (std::min({fs, 1.0 - fs}) < margin || std::min({ft, 1.0 - ft}) < margin) {
                ok = false;
                break;
            }
        }
        if (ok)
            return {corner, corner + 1.0, corner + 1.0 + curve.tau(), corner + curve.tau()};
    }
    throw ContourError("offsetParallelogram: could not place a boundary clear of singular points");
}

}  // namespace

SimpleStructureReport checkSimpleStructure(const MeromorphicMatrixMap& F, const SimpleNullPoleData& d,
                                           const EllipticCurve& curve, const Tolerances& tol) {
    SimpleStructureReport rep;
    d.validate(curve, tol.lattice);
    const int N = d.count();
    const int r = F.rows();
    auto fail = [&](const std::string& msg) { rep.failures.push_back(msg); };

    std::vector<Complex> support;
    for (const auto& z : d.zeros) support.push_back(z.at.rep());
    for (const auto& p : d.poles) support.push_back(p.at.rep());
    for (const auto& dp : F.declaredPoles()) support.push_back(dp.at.rep());

    auto detF = [&](Complex u) -> Complex { return F(u).determinant(); };
    auto othersAround = [&](Complex center) {
        std::vector<Complex> out;
        for (Complex p : support)
            if (curve.latticeDistance(p, center) > 1e-9) out.push_back(p);
        return out;
    };

    // Nondegeneracy: det F must be nonzero somewhere.
    {
        bool nonzero = false;
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> uni(0.05, 0.95);
        for (int t = 0; t < 12 && !nonzero; ++t) {
            Complex u = curve.fromLatticeCoords(uni(rng), uni(rng));
            bool nearSing = false;
            for (Complex p : support)
                if (curve.latticeDistance(u, p) < 0.05) nearSing = true;
            if (nearSing) continue;
            if (std::abs(detF(u)) > 1e-12) nonzero = true;
        }
        if (!nonzero) {
            fail("det F vanishes at all probe points (degenerate map)");
            return rep;
        }
    }

    // (1) Windings: total over an offset parallelogram boundary and locally.
    try {
        auto corners = offsetParallelogram(curve, support, 0.04, 99);
        int total = windingNumberPath(detF, corners, 768);
        if (total != 0) fail("boundary winding of det F is " + std::to_string(total) + ", want 0");
    } catch (const ContourError& e) {
        fail(std::string("boundary winding: ") + e.what());
    }
    for (int i = 0; i < N; ++i) {
        double rad = clearRadius(curve, d.zeros[i].at.rep(), othersAround(d.zeros[i].at.rep()), 0.08);
        int w = windingNumber(detF, ContourSpec{d.zeros[i].at.rep(), rad, 512});
        if (w != 1) fail("local winding at zero " + std::to_string(i) + " is " + std::to_string(w));
    }
    for (int i = 0; i < N; ++i) {
        double rad = clearRadius(curve, d.poles[i].at.rep(), othersAround(d.poles[i].at.rep()), 0.08);
        int w = windingNumber(detF, ContourSpec{d.poles[i].at.rep(), rad, 512});
        if (w != -1) fail("local winding at pole " + std::to_string(i) + " is " + std::to_string(w));
    }

    // (2) Only simple poles, and only at the w_i.
    double secondOrder = 0.0;
    for (int i = 0; i < N; ++i) {
        Complex w = d.poles[i].at.rep();
        double rad = clearRadius(curve, w, othersAround(w), 0.08);
        MatrixFn f = [&](Complex u) { return F(u); };
        Mat c2 = laurentCoefficient(f, ContourSpec{w, rad, 256}, -2);
        Mat c1 = laurentCoefficient(f, ContourSpec{w, rad, 256}, -1);
        double scale = std::max(1.0, c1.norm());
        secondOrder = std::max(secondOrder, c2.norm() / scale);
        if (c2.norm() > tol.coeffZero * scale)
            fail("pole at w_" + std::to_string(i) + " is not simple");
    }
    rep.maxSecondOrderCoeff = secondOrder;
    {
        // Grid scan for unexpected blow-ups away from the declared poles.
        const int g = 13;
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b) {
                Complex u = curve.fromLatticeCoords((a + 0.5) / g, (b + 0.5) / g);
                bool nearPole = false;
                for (Complex p : support)
                    if (curve.latticeDistance(u, p) < 0.1) nearPole = true;
                if (nearPole) continue;
                if (!F(u).allFinite() || F(u).norm() > 1e9) {
                    fail("unexpected singularity near grid point");
                    a = g;
                    break;
                }
            }
    }

    // (3) x_i spans the right kernel of F(z_i). Rank is judged against the
    // scale of F on a small circle around the zero, not against F(z_i) itself
    // (which is what degenerates there).
    double kernelResidual = 0.0;
    for (int i = 0; i < N; ++i) {
        Complex z = d.zeros[i].at.rep();
        Mat Fz = F(z);
        double rad = clearRadius(curve, z, othersAround(z), 0.08);
        double scale = 1.0;
        for (int j = 0; j < 8; ++j)
            scale = std::max(scale, F(z + rad * std::polar(1.0, 2.0 * kPi * j / 8.0)).norm());
        double resid = (Fz * d.zeros[i].x).norm() / (scale * d.zeros[i].x.norm());
        kernelResidual = std::max(kernelResidual, resid);
        if (resid > tol.coeffZero) fail("x does not annihilate F at zero " + std::to_string(i));
        Eigen::JacobiSVD<Mat> svd(Fz);
        int rankAtScale = 0;
        for (int k = 0; k < int(svd.singularValues().size()); ++k)
            if (svd.singularValues()(k) > 1e-7 * scale) ++rankAtScale;
        if (rankAtScale != r - 1)
            fail("right kernel at zero " + std::to_string(i) + " is not clearly 1-dimensional");
    }
    rep.maxKernelResidual = kernelResidual;

    // (4) y_i^T spans the left kernel of F^{-1} at w_i; rank-1 residue seen by y_i.
    for (int i = 0; i < N; ++i) {
        Complex w = d.poles[i].at.rep();
        double rad = clearRadius(curve, w, othersAround(w), 0.08);
        Mat Finv = inverseAt(F, w, rad);
        double scale = std::max(1.0, Finv.norm());
        const Col& y = d.poles[i].y;
        double resid = (y.transpose() * Finv).norm() / (scale * y.norm());
        if (resid > tol.coeffZero) fail("y^T does not annihilate F^{-1} at pole " + std::to_string(i));
        MatrixFn f = [&](Complex u) { return F(u); };
        Mat res = laurentCoefficient(f, ContourSpec{w, rad, 256}, -1);
        if (res.norm() < 1e-12) {
            fail("residue vanishes at pole " + std::to_string(i));
            continue;
        }
        if (numericalRank(res, 1e-6) != 1)
            fail("residue at pole " + std::to_string(i) + " is not rank 1");
        if ((y.transpose() * res).norm() < 1e-8 * res.norm() * y.norm())
            fail("y^T annihilates the residue at pole " + std::to_string(i));
    }

    rep.ok = rep.failures.empty();
    return rep;
}

LocalInterpolationReport verifyLocalInterpolation(const MeromorphicMatrixMap& F,
                                                  const SylvesterDataSet& T, Complex q0,
                                                  double contourRadius, const Tolerances& tol,
                                                  bool cancellationChecks) {
    LocalInterpolationReport rep;
    const int r = F.rows();
    auto fail = [&](const std::string& msg) { rep.failures.push_back(msg); };

    // (i) rows of F belong to the singular subspace.
    for (int i = 0; i < r; ++i) {
        RowGerm germ{[&, i](Complex u) -> Row { return F(u).row(i); },
                     std::max(1, T.poleSize())};
        MembershipReport m = membership(germ, T, q0, contourRadius, tol);
        rep.rowResidual = std::max({rep.rowResidual, m.matchResidual, m.holoResidual,
                                    m.couplingResidual});
        if (!m.member) fail("row " + std::to_string(i) + ": " + m.diagnostic);
    }

    double scale = 1.0;
    for (int j = 0; j < 8; ++j) {
        Complex z = q0 + contourRadius * std::polar(1.0, 2.0 * kPi * j / 8.0);
        scale = std::max(scale, F(z).norm());
    }

    // (ii) F Bz (zI - Az)^{-1} extends across q0.
    if (cancellationChecks && T.nullSize() > 0) {
        MatrixFn g = [&](Complex u) -> Mat {
            Mat acc = Mat::Zero(r, T.nullSize());
            Mat power = Mat::Identity(T.nullSize(), T.nullSize());
            Complex zinv = 1.0 / (u - q0);
            Complex zpow = zinv;
            for (int j = 0; j < T.nullSize(); ++j) {
                acc += zpow * (F(u) * T.Bz * power);
                power = power * T.Az;
                zpow *= zinv;
            }
            return acc;
        };
        double bad = 0.0;
        for (int m = 1; m <= T.nullSize() + 1; ++m)
            bad = std::max(bad, laurentCoefficient(g, ContourSpec{q0, contourRadius, 256}, -m).norm());
        rep.nullCancelResidual = bad / scale;
        if (rep.nullCancelResidual > tol.coeffZero) fail("zero cancellation fails");
    }

    // (iii) (zI - Api)^{-1} Cpi F^{-1} extends across q0.
    if (cancellationChecks && T.poleSize() > 0) {
        MatrixFn g = [&](Complex u) -> Mat {
            const int np = T.poleSize();
            Mat acc = Mat::Zero(np, r);
            Mat power = Mat::Identity(np, np);
            Complex zinv = 1.0 / (u - q0);
            Complex zpow = zinv;
            Mat Finv = F(u).inverse();
            for (int j = 0; j < np; ++j) {
                acc += zpow * (power * T.Cpi * Finv);
                power = power * T.Api;
                zpow *= zinv;
            }
            return acc;
        };
        double bad = 0.0;
        for (int m = 1; m <= T.poleSize() + 1; ++m)
            bad = std::max(bad, laurentCoefficient(g, ContourSpec{q0, contourRadius, 256}, -m).norm());
        rep.poleCancelResidual = bad / scale;
        if (rep.poleCancelResidual > tol.coeffZero) fail("pole cancellation fails");
    }

    // (iv) local winding of det F.
    try {
        auto detF = [&](Complex u) { return F(u).determinant(); };
        rep.winding = windingNumber(detF, ContourSpec{q0, contourRadius, 512});
        if (rep.winding != T.nullSize() - T.poleSize())
            fail("local winding " + std::to_string(rep.winding) + " != nz - np = " +
                 std::to_string(T.nullSize() - T.poleSize()));
    } catch (const ContourError& e) {
        fail(std::string("winding: ") + e.what());
    }

    rep.ok = rep.failures.empty();
    return rep;
}

}  // namespace mtriv
