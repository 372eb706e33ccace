#include "mtriv/trivialize.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <random>

namespace mtriv {

namespace {

Complex principalLog(Complex alpha) { return std::log(alpha); }

// l_alpha = Log(alpha) / (2 pi i), principal branch.
Complex lAlpha(Complex alpha) { return principalLog(alpha) / kTwoPiI; }

// Unsigned Stirling numbers of the first kind: x(x+1)...(x+j-1) = sum_m c[j][m] x^m.
std::vector<std::vector<double>> risingFactorialCoeffs(int jmax) {
    std::vector<std::vector<double>> c(jmax + 1);
    c[0] = {1.0};
    for (int j = 0; j < jmax; ++j) {
        c[j + 1].assign(j + 2, 0.0);
        for (int m = 0; m <= j; ++m) {
            c[j + 1][m + 1] += c[j][m];
            c[j + 1][m] += double(j) * c[j][m];
        }
    }
    return c;
}

// Derivatives h^{(0..m)} of h = theta'/theta at v, by the quotient recurrence
// (N/D)^{(m)} = (N^{(m)} - sum_{j=1}^m binom(m,j) (N/D)^{(m-j)} D^{(j)}) / D.
std::vector<Complex> logDerivJet(const ThetaEvaluator& ev, Complex v, int m) {
    std::vector<Complex> h(m + 1);
    Complex D = ev.theta(v);
    std::vector<double> binom(m + 2, 0.0);
    for (int k = 0; k <= m; ++k) {
        Complex num = ev.thetaDeriv(v, k + 1);
        double b = 1.0;
        for (int j = 1; j <= k; ++j) {
            b = b * double(k - j + 1) / double(j);
            num -= b * h[k - j] * ev.thetaDeriv(v, j);
        }
        h[k] = num / D;
    }
    return h;
}

}  // namespace

MeromorphicMatrixMap scalarTrivialization(const ThetaEvaluator& ev, Complex alpha) {
    if (alpha == Complex(0.0)) throw std::invalid_argument("scalarTrivialization: alpha must be nonzero");
    const EllipticCurve curve = ev.curve();
    if (alpha == Complex(1.0)) {
        Mat one = Mat::Ones(1, 1);
        return MeromorphicMatrixMap(1, 1, [one](Complex) { return one; }, {},
                                    FlatFactor::scalar(1.0));
    }
    const Complex l = lAlpha(alpha);
    const Complex delta = ev.halfPeriodSum();
    auto f = [ev, l](Complex u) -> Complex { return ev.theta(u - l) / ev.theta(u); };
    return MeromorphicMatrixMap::scalarMap(f, {{TorusPoint(curve, delta), 1}},
                                           FlatFactor::scalar(alpha));
}

MeromorphicMatrixMap blockThetaTriv(const ThetaEvaluator& ev, Complex alpha, int r) {
    if (alpha == Complex(0.0)) throw std::invalid_argument("blockThetaTriv: alpha must be nonzero");
    if (r < 1 || r > 8) throw std::invalid_argument("blockThetaTriv: rank must be in 1..8");
    const EllipticCurve curve = ev.curve();
    const Complex l = lAlpha(alpha);
    const Complex delta = ev.halfPeriodSum();
    auto stirling = risingFactorialCoeffs(r - 1);

    auto eval = [ev, alpha, r, l, stirling](Complex u) -> Mat {
        Complex th = ev.theta(u);
        Complex v = u - l;
        // L_j[theta](v) = ((-1)^j / (alpha^j j!)) sum_m c[j][m] (2 pi i)^{-m} theta^{(m)}(v)
        std::vector<Complex> thetaDerivs(r);
        for (int m = 0; m < r; ++m) thetaDerivs[m] = ev.thetaDeriv(v, m);
        std::vector<Complex> L(r);
        double fact = 1.0;
        Complex alphaPow = 1.0;
        for (int j = 0; j < r; ++j) {
            if (j > 0) {
                fact *= j;
                alphaPow *= alpha;
            }
            Complex sum = 0.0;
            Complex twoPiPow = 1.0;
            for (int m = 0; m <= j; ++m) {
                if (m > 0) twoPiPow *= kTwoPiI;
                sum += stirling[j][m] * thetaDerivs[m] / twoPiPow;
            }
            double sign = (j % 2 == 0) ? 1.0 : -1.0;
            L[j] = sign / (alphaPow * fact) * sum;
        }
        Mat G = Mat::Zero(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) G(i, j) = L[j - i] / th;
        return G;
    };
    return MeromorphicMatrixMap(r, r, eval, {{TorusPoint(curve, delta), 1}},
                                FlatFactor::jordan(alpha, r));
}

Complex lambdaA(const ThetaEvaluator& ev, Complex a, Complex u) {
    return lambdaADeriv(ev, a, u, 0);
}

Complex lambdaADeriv(const ThetaEvaluator& ev, Complex a, Complex u, int k) {
    if (latticeEquivalent(ev.curve(), u, a, 1e-9))
        throw PoleError("lambdaA: argument is at a pole (u = a mod lattice)");
    Complex v = u - a - ev.halfPeriodSum();
    auto jet = logDerivJet(ev, v, k);
    return -jet[k] / kTwoPiI;
}

std::vector<Complex> pnPoly(Complex alpha, int n) {
    if (alpha == Complex(0.0)) throw std::invalid_argument("pnPoly: alpha must be nonzero");
    if (n < 0) throw std::invalid_argument("pnPoly: n must be nonnegative");
    if (n == 0) return {Complex(1.0)};
    std::vector<Complex> coeffs{Complex(1.0)};  // running product, highest degree last
    for (int j = 0; j <= n - 1; ++j) {
        // multiply by (x - j)
        std::vector<Complex> next(coeffs.size() + 1, Complex(0.0));
        for (size_t i = 0; i < coeffs.size(); ++i) {
            next[i + 1] += coeffs[i];
            next[i] -= double(j) * coeffs[i];
        }
        coeffs = std::move(next);
    }
    double fact = 1.0;
    for (int j = 2; j <= n; ++j) fact *= j;
    Complex scale = std::pow(alpha, -double(n)) / fact;
    for (auto& c : coeffs) c *= scale;
    return coeffs;
}

Complex evalPoly(const std::vector<Complex>& coeffs, Complex x) {
    Complex acc = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

MeromorphicMatrixMap singlePoleTriv(const ThetaEvaluator& ev, Complex alpha, int r, Complex a) {
    if (alpha == Complex(0.0)) throw std::invalid_argument("singlePoleTriv: alpha must be nonzero");
    if (r < 1 || r > 8) throw std::invalid_argument("singlePoleTriv: rank must be in 1..8");
    const EllipticCurve curve = ev.curve();
    std::vector<std::vector<Complex>> polys(r);
    for (int n = 0; n < r; ++n) polys[n] = pnPoly(alpha, n);

    auto eval = [ev, a, r, polys](Complex u) -> Mat {
        Complex lam = lambdaA(ev, a, u);
        Mat G = Mat::Zero(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = i; j < r; ++j) G(i, j) = evalPoly(polys[j - i], lam);
        return G;
    };
    // Factor of automorphy: G_r(u+tau) = alpha^{-1} J_alpha G_r(u), and
    // alpha^{-1} J_alpha = D J_1 D^{-1} with D = diag(1, alpha, alpha^2, ...).
    std::vector<DeclaredPole> poles;
    if (r > 1) poles.push_back({TorusPoint(curve, a), r - 1});
    Mat D = Mat::Zero(r, r);
    Complex pw = 1.0;
    for (int i = 0; i < r; ++i) {
        D(i, i) = pw;
        pw *= alpha;
    }
    FlatFactor factor({{Complex(1.0), r}}, D);
    return MeromorphicMatrixMap(r, r, eval, poles, factor);
}

double verifyAutomorphy(const MeromorphicMatrixMap& F, const FlatFactor& factor,
                        const EllipticCurve& curve, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("verifyAutomorphy: need at least one sample");
    const Mat V = factor.monodromy();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.03, 0.97);
    const Complex tau = curve.tau();
    double worst = -1.0;
    int used = 0;
    for (int trial = 0; trial < samples * 8 && used < samples; ++trial) {
        Complex u = curve.fromLatticeCoords(uni(rng), uni(rng));
        bool clear = true;
        for (const auto& p : F.declaredPoles())
            for (Complex probe : {u, u + 1.0, u + tau})
                if (curve.latticeDistance(probe, p.at.rep()) < 0.05) clear = false;
        if (!clear) continue;
        Mat Fu = F(u);
        double scale = std::max(Fu.norm(), 1e-300);
        double e1 = (F(u + 1.0) - Fu).norm() / scale;
        double etau = (F(u + tau) - V * Fu).norm() / scale;
        worst = std::max({worst, e1, etau});
        ++used;
    }
    if (used == 0)
        throw std::runtime_error("verifyAutomorphy: all samples landed near declared poles");
    return worst;
}

PrincipalPartBasis principalPartBasis(const ThetaEvaluator& ev, Complex alpha, int kmax,
                                      Complex center, std::optional<Complex> alphaOneAux) {
    if (kmax < 1 || kmax > 6) throw std::invalid_argument("principalPartBasis: kmax must be in 1..6");
    const EllipticCurve curve = ev.curve();
    const Complex delta = ev.halfPeriodSum();
    PrincipalPartBasis out;
    out.center = center;

    if (alpha == Complex(1.0)) {
        // Elliptic family from derivatives of lambda. k = 1 needs a second
        // pole; k >= 2 come from lambda^{(k-1)} alone.
        Complex aux = alphaOneAux.value_or(center + 0.37 + 0.29 * curve.tau());
        out.auxiliaryPole = aux;
        for (int k = 1; k <= kmax; ++k) {
            std::vector<DeclaredPole> poles{{TorusPoint(curve, center), k}};
            std::function<Complex(Complex)> f;
            if (k == 1) {
                poles.push_back({TorusPoint(curve, aux), 1});
                f = [ev, center, aux](Complex u) -> Complex {
                    return -kTwoPiI * (lambdaA(ev, center, u) - lambdaA(ev, aux, u));
                };
            } else {
                double fact = 1.0;
                for (int j = 2; j <= k - 1; ++j) fact *= j;
                Complex scale = kTwoPiI * ((k % 2 == 0) ? 1.0 : -1.0) / fact;
                f = [ev, center, scale, k](Complex u) -> Complex {
                    return scale * lambdaADeriv(ev, center, u, k - 1);
                };
            }
            out.s.push_back(MeromorphicMatrixMap::scalarMap(f, poles, FlatFactor::scalar(1.0)));
        }
        return out;
    }

    const Complex l = lAlpha(alpha);
    // Raw building blocks q_k(u) = (theta(u - center - mu_k + Delta ... ) --
    // concretely (theta(u - center - b_k) / theta(u - center - Delta))^k with
    // b_k = Delta + (l_alpha + m)/k for an integer branch m keeping b_k off
    // Delta mod the lattice.
    std::vector<std::function<Complex(Complex)>> raw(kmax);
    for (int k = 1; k <= kmax; ++k) {
        Complex bk;
        bool found = false;
        for (int m = 0; m < k && !found; ++m) {
            Complex cand = delta + (l + double(m)) / double(k);
            if (curve.latticeDistance(cand, delta) > 0.02) {
                bk = cand;
                found = true;
            }
        }
        if (!found) {
            // alpha is a lattice character: every branch collides. Perturb the
            // zero location slightly; automorphy then holds only to ~1e-7 and
            // the note records it.
            bk = delta + (l + 1e-7) / double(k);
            out.notes += "degenerate character at k=" + std::to_string(k) +
                         ": zero location perturbed by 1e-7; ";
        }
        raw[k - 1] = [ev, center, bk, k, delta](Complex u) -> Complex {
            Complex ratio = ev.theta(u - center - bk) / ev.theta(u - center - delta);
            Complex acc = 1.0;
            for (int i = 0; i < k; ++i) acc *= ratio;
            return acc;
        };
    }

    // Triangular cleanup: normalize the leading coefficient to 1, then strip
    // lower-order negative coefficients with the already-built members.
    const double rad = 0.08;
    std::vector<std::function<Complex(Complex)>> basis;
    for (int k = 1; k <= kmax; ++k) {
        auto cur = raw[k - 1];
        Complex lead = laurentCoefficient(ScalarFn([&](Complex z) { return cur(z); }),
                                          ContourSpec{center, rad, 256}, -k);
        if (std::abs(lead) < 1e-10)
            throw ConstructionError("principalPartBasis: leading Laurent coefficient vanished");
        std::function<Complex(Complex)> g = [cur, lead](Complex u) { return cur(u) / lead; };
        for (int j = k - 1; j >= 1; --j) {
            Complex cj = laurentCoefficient(ScalarFn([&](Complex z) { return g(z); }),
                                            ContourSpec{center, rad, 256}, -j);
            if (std::abs(cj) < 1e-13) continue;
            auto prev = basis[j - 1];
            auto gOld = g;
            g = [gOld, prev, cj](Complex u) { return gOld(u) - cj * prev(u); };
        }
        basis.push_back(g);
    }
    for (int k = 1; k <= kmax; ++k)
        out.s.push_back(MeromorphicMatrixMap::scalarMap(
            basis[k - 1], {{TorusPoint(curve, center), k}}, FlatFactor::scalar(alpha)));
    return out;
}

TrivializationWithData baseTrivialization(const ThetaEvaluator& ev, Complex alpha) {
    const EllipticCurve curve = ev.curve();
    MeromorphicMatrixMap F = scalarTrivialization(ev, alpha);
    SimpleNullPoleData data;
    if (alpha != Complex(1.0)) {
        // theta(u - l_alpha) vanishes on Delta + l_alpha + lattice.
        Col one = Col::Ones(1);
        data.zeros.push_back({TorusPoint(curve, ev.halfPeriodSum() + lAlpha(alpha)), one});
        data.poles.push_back({TorusPoint(curve, ev.halfPeriodSum()), one});
    }
    return {F, data, alpha, 1};
}

namespace {

Complex freshPoint(const EllipticCurve& curve, std::mt19937_64& rng,
                   const std::vector<Complex>& avoid, double margin) {
    std::uniform_real_distribution<double> uni(0.08, 0.92);
    for (int t = 0; t < 256; ++t) {
        Complex p = curve.fromLatticeCoords(uni(rng), uni(rng));
        bool ok = true;
        for (Complex q : avoid)
            if (curve.latticeDistance(p, q) < margin) ok = false;
        if (ok) return p;
    }
    throw ConstructionError("extendTrivialization: could not place a fresh point");
}

}  // namespace

TrivializationWithData extendTrivialization(const ThetaEvaluator& ev,
                                            const TrivializationWithData& Fr, Complex alpha,
                                            std::uint64_t seed) {
    const EllipticCurve curve = ev.curve();
    const int r = Fr.rank;
    if (r + 1 > 4) throw std::invalid_argument("extendTrivialization: rank cap r+1 <= 4");
    const Complex a = 0.0;
    const Complex delta = ev.halfPeriodSum();
    const Complex l = (alpha == Complex(1.0)) ? Complex(0.0) : lAlpha(alpha);
    std::mt19937_64 rng(seed);

    std::vector<Complex> avoid{a, delta, delta + l};
    for (const auto& z : Fr.data.zeros) avoid.push_back(z.at.rep());
    for (const auto& w : Fr.data.poles) avoid.push_back(w.at.rep());

    // Fresh zero/pole pair(s) and the scalar s_0 carrying them.
    std::function<Complex(Complex)> s0;
    std::vector<Complex> newZeros, newPoles;
    Complex auxPole;
    if (alpha != Complex(1.0)) {
        Complex pi1 = freshPoint(curve, rng, avoid, 0.12);
        Complex zeta1 = pi1 + l;
        for (int t = 0; t < 64; ++t) {
            bool clear = true;
            for (Complex q : avoid)
                if (curve.latticeDistance(zeta1, q) < 0.1) clear = false;
            if (curve.latticeDistance(zeta1, pi1) < 0.1) clear = false;
            if (clear) break;
            pi1 = freshPoint(curve, rng, avoid, 0.12);
            zeta1 = pi1 + l;
        }
        newPoles = {pi1};
        newZeros = {zeta1};
        s0 = [ev, pi1, delta, l](Complex u) -> Complex {
            return ev.theta(u - pi1 + delta - l) / ev.theta(u - pi1 + delta);
        };
    } else {
        Complex pi1 = freshPoint(curve, rng, avoid, 0.12);
        avoid.push_back(pi1);
        Complex pi2 = freshPoint(curve, rng, avoid, 0.12);
        avoid.push_back(pi2);
        Complex zeta1 = freshPoint(curve, rng, avoid, 0.12);
        avoid.push_back(zeta1);
        Complex zeta2 = pi1 + pi2 - zeta1;
        for (int t = 0; t < 64; ++t) {
            bool clear = true;
            for (Complex q : avoid)
                if (curve.latticeDistance(zeta2, q) < 0.1) clear = false;
            if (clear) break;
            avoid.pop_back();
            zeta1 = freshPoint(curve, rng, avoid, 0.12);
            avoid.push_back(zeta1);
            zeta2 = pi1 + pi2 - zeta1;
        }
        newPoles = {pi1, pi2};
        newZeros = {zeta1, zeta2};
        auxPole = pi2;
        s0 = [ev, zeta1, zeta2, pi1, pi2, delta](Complex u) -> Complex {
            return ev.theta(u - zeta1 + delta) * ev.theta(u - zeta2 + delta) /
                   (ev.theta(u - pi1 + delta) * ev.theta(u - pi2 + delta));
        };
    }

    // Row p(u) S_r(u) with p = (p_1(lambda_a), ..., p_r(lambda_a)) and
    // S_r = G_r^{-1} F_r.
    std::vector<std::vector<Complex>> polys(r + 1);
    for (int n = 0; n <= r; ++n) polys[n] = pnPoly(alpha, n);
    MeromorphicMatrixMap Gr = singlePoleTriv(ev, alpha, r, a);
    MeromorphicMatrixMap FrMap = Fr.F;
    auto rowPS = [ev, a, r, polys, Gr, FrMap](Complex u) -> Row {
        Complex lam = lambdaA(ev, a, u);
        Row p(r);
        for (int j = 0; j < r; ++j) p(j) = evalPoly(polys[j + 1], lam);
        Mat Sr = Gr(u).inverse() * FrMap(u);
        return p * Sr;
    };

    // Remove the poles at a: subtract principal parts against the basis.
    PrincipalPartBasis basis =
        (alpha == Complex(1.0))
            ? principalPartBasis(ev, alpha, std::max(1, r), a, auxPole)
            : principalPartBasis(ev, alpha, std::max(1, r), a);
    std::vector<Complex> avoidNotA;
    for (Complex q : avoid)
        if (curve.latticeDistance(q, a) > 1e-9) avoidNotA.push_back(q);
    for (Complex q : newPoles) avoidNotA.push_back(q);
    for (Complex q : newZeros) avoidNotA.push_back(q);
    const double radA = clearRadius(curve, a, avoidNotA, 0.09);
    Mat coeff(r, r);  // coeff(j, k-1): coefficient of (u-a)^{-k} in column j
    for (int j = 0; j < r; ++j)
        for (int k = 1; k <= r; ++k)
            coeff(j, k - 1) = laurentCoefficient(
                ScalarFn([&, j](Complex z) { return rowPS(z)(j); }), ContourSpec{a, radA, 256}, -k);

    std::vector<MeromorphicMatrixMap> basisMaps = basis.s;
    auto rowCorrected = [rowPS, coeff, basisMaps, r](Complex u) -> Row {
        Row v = rowPS(u);
        for (int j = 0; j < r; ++j)
            for (int k = 1; k <= r; ++k)
                if (std::abs(coeff(j, k - 1)) > 1e-13)
                    v(j) -= coeff(j, k - 1) * basisMaps[k - 1].scalarAt(u);
        return v;
    };

    // Remove the residues at the previous pole points so F_{r+1}^{-1} stays
    // analytic there.
    std::vector<Complex> oldPoles;
    for (const auto& w : Fr.data.poles) oldPoles.push_back(w.at.rep());
    std::vector<Row> resRows;
    std::vector<std::function<Complex(Complex)>> poleKillers;
    for (Complex w : oldPoles) {
        std::vector<Complex> others;
        for (Complex q : avoid)
            if (curve.latticeDistance(q, w) > 1e-9) others.push_back(q);
        for (Complex q : newPoles) others.push_back(q);
        for (Complex q : newZeros) others.push_back(q);
        double rad = clearRadius(curve, w, others, 0.09);
        Row res(r);
        for (int j = 0; j < r; ++j)
            res(j) = laurentCoefficient(ScalarFn([&, j](Complex z) { return rowCorrected(z)(j); }),
                                        ContourSpec{w, rad, 256}, -1);
        resRows.push_back(res);
        if (alpha != Complex(1.0)) {
            PrincipalPartBasis local = principalPartBasis(ev, alpha, 1, w);
            MeromorphicMatrixMap k1 = local.s[0];
            poleKillers.push_back([k1](Complex u) { return k1.scalarAt(u); });
        } else {
            Complex aux = auxPole;
            poleKillers.push_back([ev, w, aux](Complex u) -> Complex {
                return -kTwoPiI * (lambdaA(ev, w, u) - lambdaA(ev, aux, u));
            });
        }
    }
    auto rowFinal = [rowCorrected, resRows, poleKillers, r](Complex u) -> Row {
        Row v = rowCorrected(u);
        for (size_t i = 0; i < resRows.size(); ++i) {
            Complex killer = poleKillers[i](u);
            for (int j = 0; j < r; ++j)
                if (std::abs(resRows[i](j)) > 1e-12) v(j) -= resRows[i](j) * killer;
        }
        return v;
    };

    auto eval = [s0, rowFinal, FrMap, r](Complex u) -> Mat {
        Mat F(r + 1, r + 1);
        F.setZero();
        F(0, 0) = s0(u);
        F.block(0, 1, 1, r) = rowFinal(u);
        F.block(1, 1, r, r) = FrMap(u);
        return F;
    };

    std::vector<DeclaredPole> declared;
    for (const auto& w : Fr.data.poles) declared.push_back({w.at, 1});
    for (Complex w : newPoles) declared.push_back({TorusPoint(curve, w), 1});
    // Factor: xi_{J_alpha^{(r+1)}} is trivialized only after the S_r twist; the
    // assembled F satisfies F(u+tau) = J_alpha F(u).
    FlatFactor factor = FlatFactor::jordan(alpha, r + 1);
    MeromorphicMatrixMap Fnew(r + 1, r + 1, eval, declared, factor);

    // New simple data: kernels computed numerically and verified.
    SimpleNullPoleData data;
    std::vector<Complex> allZeros, allPoles;
    for (const auto& z : Fr.data.zeros) allZeros.push_back(z.at.rep());
    for (Complex z : newZeros) allZeros.push_back(z);
    for (const auto& w : Fr.data.poles) allPoles.push_back(w.at.rep());
    for (Complex w : newPoles) allPoles.push_back(w);

    std::vector<Complex> allSupport = allZeros;
    allSupport.insert(allSupport.end(), allPoles.begin(), allPoles.end());
    for (Complex z : allZeros) {
        Mat Fz = Fnew(z);
        Eigen::JacobiSVD<Mat> svd(Fz, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv(r) > 1e-6 * sv(0))
            throw ConstructionError("extendTrivialization: expected zero of F is not a kernel point");
        Col x = svd.matrixV().col(r);
        data.zeros.push_back({TorusPoint(curve, z), x});
    }
    for (Complex w : allPoles) {
        std::vector<Complex> others;
        for (Complex q : allSupport)
            if (curve.latticeDistance(q, w) > 1e-9) others.push_back(q);
        double rad = clearRadius(curve, w, others, 0.09);
        Mat Finv = inverseAt(Fnew, w, rad);
        Eigen::JacobiSVD<Mat> svd(Finv, Eigen::ComputeFullU);
        const auto& sv = svd.singularValues();
        if (sv(r) > 1e-6 * sv(0))
            throw ConstructionError("extendTrivialization: F^{-1} has no kernel at a pole point");
        Col y = svd.matrixU().col(r).conjugate();
        data.poles.push_back({TorusPoint(curve, w), y});
    }

    return {Fnew, data, alpha, r + 1};
}

}  // namespace mtriv
