#include "mtriv/kernels.hpp"

#include <array>
#include <cmath>

namespace mtriv {

PrimeFormEvaluator::PrimeFormEvaluator(const ThetaEvaluator& ev) : ev_(ev) {
    d0_ = ev_.thetaCharDeriv(oddChar_, 0.0, 1);
    if (std::abs(d0_) < 1e-14)
        throw std::runtime_error("PrimeFormEvaluator: theta[1/2,1/2]'(0) vanished");
}

Complex cauchyKernel(const PrimeFormEvaluator& E, const FlatLineBundle& chi, Complex p, Complex q) {
    const ThetaEvaluator& ev = E.thetaEvaluator();
    Characteristic ch(chi.a(), chi.b());
    Complex at0 = ev.thetaChar(ch, 0.0);
    if (std::abs(at0) < 1e-12)
        throw std::runtime_error("cauchyKernel: degenerate bundle (theta(be) = 0)");
    Complex Eqp = E(q, p);
    if (std::abs(Eqp) < 1e-14) throw PoleError("cauchyKernel: p = q is on the diagonal");
    return ev.thetaChar(ch, q - p) / (at0 * Eqp);
}

Complex cauchyKernelViaTheta(const PrimeFormEvaluator& E, const FlatLineBundle& chi, Complex p,
                             Complex q) {
    const ThetaEvaluator& ev = E.thetaEvaluator();
    Complex be = chi.be(ev.curve());
    Complex thBe = ev.theta(be);
    if (std::abs(thBe) < 1e-12)
        throw std::runtime_error("cauchyKernelViaTheta: degenerate bundle (theta(be) = 0)");
    Complex Eqp = E(q, p);
    if (std::abs(Eqp) < 1e-14) throw PoleError("cauchyKernelViaTheta: p = q is on the diagonal");
    return std::exp(kTwoPiI * chi.a() * (q - p)) * ev.theta(q - p + be) / (thBe * Eqp);
}

namespace {

// Truncated 2D Taylor jet: T[i][j] = (d/dw)^i (d/dp)^j f / (i! j!).
struct Jet2 {
    int wmax, pmax;
    std::vector<Complex> c;  // (wmax+1) x (pmax+1), row-major in w

    Jet2(int wm, int pm) : wmax(wm), pmax(pm), c((wm + 1) * (pm + 1), Complex(0.0)) {}
    Complex& at(int i, int j) { return c[i * (pmax + 1) + j]; }
    Complex at(int i, int j) const { return c[i * (pmax + 1) + j]; }

    Jet2 operator*(const Jet2& o) const {
        Jet2 out(wmax, pmax);
        for (int i = 0; i <= wmax; ++i)
            for (int j = 0; j <= pmax; ++j) {
                Complex acc = 0.0;
                for (int a = 0; a <= i; ++a)
                    for (int b = 0; b <= j; ++b) acc += at(a, b) * o.at(i - a, j - b);
                out.at(i, j) = acc;
            }
        return out;
    }

    Jet2 reciprocal() const {
        Jet2 out(wmax, pmax);
        Complex f0 = at(0, 0);
        if (std::abs(f0) < 1e-300) throw std::runtime_error("Jet2: reciprocal at a zero");
        for (int i = 0; i <= wmax; ++i)
            for (int j = 0; j <= pmax; ++j) {
                if (i == 0 && j == 0) {
                    out.at(0, 0) = 1.0 / f0;
                    continue;
                }
                Complex acc = 0.0;
                for (int a = 0; a <= i; ++a)
                    for (int b = 0; b <= j; ++b) {
                        if (a == 0 && b == 0) continue;
                        acc += at(a, b) * out.at(i - a, j - b);
                    }
                out.at(i, j) = -acc / f0;
            }
        return out;
    }
};

double factorialTable(int n) {
    static const std::array<double, 13> f{1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800,
                                          39916800, 479001600};
    return f[size_t(n)];
}

// Jet of theta(cw*w + cp*p + shift) (kind = 0) or theta[1/2,1/2](...)
// (kind = 1) around the working point.
Jet2 thetaFactorJet(const ThetaEvaluator& ev, const PrimeFormEvaluator& prime, int kind, double cw,
                    double cp, Complex arg, int wmax, int pmax) {
    Jet2 out(wmax, pmax);
    for (int i = 0; i <= wmax; ++i)
        for (int j = 0; j <= pmax; ++j) {
            Complex d = (kind == 0) ? ev.thetaDeriv(arg, i + j) : prime.thetaOddDeriv(arg, i + j);
            double sign = 1.0;
            for (int t = 0; t < i; ++t) sign *= cw;
            for (int t = 0; t < j; ++t) sign *= cp;
            out.at(i, j) = sign * d / (factorialTable(i) * factorialTable(j));
        }
    return out;
}

}  // namespace

CanonicalFunctions::CanonicalFunctions(const ThetaEvaluator& ev, const BaseDivisor& d0)
    : prime_(ev), p0_(d0.p0.rep()), p1_(d0.p1.rep()) {
    const EllipticCurve& curve = ev.curve();
    Complex target = p1_ - p0_ + ev.halfPeriodSum();
    bundle_ = FlatLineBundle::fromBe(curve, target);
    be_ = bundle_.be(curve);
    Complex thBe = prime_.thetaEvaluator().theta(be_);
    if (std::abs(thBe) < 1e-10)
        throw std::runtime_error(
            "CanonicalFunctions: theta(be) is numerically zero; choose a different base divisor");
}

Complex CanonicalFunctions::fwViaKernels(Complex w, Complex p) const {
    return cauchyKernel(prime_, bundle_, p, w) * cauchyKernel(prime_, bundle_, w, p0_) /
           cauchyKernel(prime_, bundle_, p, p0_);
}

Complex CanonicalFunctions::fwDirect(Complex w, Complex p) const {
    Complex qstar = w + p1_ - p0_;
    Complex C = prime_.oddDerivAtZero() * prime_.thetaOdd(w - p1_) /
                (prime_.thetaOdd(w - p0_) * prime_.thetaOdd(w - qstar));
    return C * prime_.thetaOdd(p - p0_) * prime_.thetaOdd(p - qstar) /
           (prime_.thetaOdd(p - w) * prime_.thetaOdd(p - p1_));
}

Complex CanonicalFunctions::fw(Complex w, Complex p) const {
    const ThetaEvaluator& ev = prime_.thetaEvaluator();
    return prime_.oddDerivAtZero() / ev.theta(be_) * prime_.thetaOdd(p - p0_) *
           ev.theta(w - p + be_) * ev.theta(p0_ - w + be_) /
           (ev.theta(p0_ - p + be_) * prime_.thetaOdd(p - w) * prime_.thetaOdd(w - p0_));
}

Complex CanonicalFunctions::fkw(int k, Complex w, Complex p) const { return fkwDp(k, 0, w, p); }

Complex CanonicalFunctions::fkwDp(int k, int m, Complex w, Complex p) const {
    if (k < 1 || k > maxOrder()) throw std::invalid_argument("fkw: order k must be in 1..6");
    if (m < 0 || m > 3) throw std::invalid_argument("fkwDp: p-derivative order must be in 0..3");
    if (k == 1 && m == 0) return fw(w, p);
    const ThetaEvaluator& ev = prime_.thetaEvaluator();
    const int wm = k - 1, pm = m;
    // f(w,p) = (theta1'(0)/theta(be)) * theta1(p-p0) theta(w-p+be) theta(p0-w+be)
    //          / (theta(p0-p+be) theta1(p-w) theta1(w-p0))
    Jet2 num = thetaFactorJet(ev, prime_, 1, 0.0, 1.0, p - p0_, wm, pm) *
               thetaFactorJet(ev, prime_, 0, 1.0, -1.0, w - p + be_, wm, pm) *
               thetaFactorJet(ev, prime_, 0, -1.0, 0.0, p0_ - w + be_, wm, pm);
    Jet2 den = thetaFactorJet(ev, prime_, 0, 0.0, -1.0, p0_ - p + be_, wm, pm) *
               thetaFactorJet(ev, prime_, 1, -1.0, 1.0, p - w, wm, pm) *
               thetaFactorJet(ev, prime_, 1, 1.0, 0.0, w - p0_, wm, pm);
    Jet2 f = num * den.reciprocal();
    Complex scale = prime_.oddDerivAtZero() / ev.theta(be_);
    return scale * f.at(k - 1, m);
}

Mat CanonicalFunctions::fwA(const Mat& A, Complex w, Complex p) const {
    const int n = int(A.rows());
    if (A.cols() != n) throw std::invalid_argument("fwA: A must be square");
    int idx = nilpotencyIndex(A);
    if (idx < 0) throw std::invalid_argument("fwA: A must be nilpotent");
    Mat out = Mat::Zero(n, n);
    Mat power = Mat::Identity(n, n);
    for (int k = 1; k <= std::max(idx, 1); ++k) {
        out += fkw(k, w, p) * power;
        power = power * A;
    }
    return out;
}

Complex residueInBasePoint(const ThetaEvaluator& ev, Complex d, Complex w, Complex p, double radius,
                           int nodes) {
    const EllipticCurve& curve = ev.curve();
    auto integrand = [&](Complex basePoint) -> Complex {
        BaseDivisor d0(curve, TorusPoint(curve, d), TorusPoint(curve, basePoint));
        CanonicalFunctions fam(ev, d0);
        return fam.fw(w, p);
    };
    return laurentCoefficient(ScalarFn(integrand), ContourSpec{w, radius, nodes}, -1);
}

ContinuityReport continuitySpotCheck(const ThetaEvaluator& ev, const BaseDivisor& d0, double eps) {
    const EllipticCurve& curve = ev.curve();
    CanonicalFunctions base(ev, d0);
    auto deviation = [&](double e) {
        BaseDivisor moved(curve, TorusPoint(curve, d0.p1.rep() + e * Complex(0.7, 0.42)), d0.p0);
        CanonicalFunctions fam(ev, moved);
        double worst = 0.0;
        std::vector<Complex> ws = {curve.fromLatticeCoords(0.21, 0.33),
                                   curve.fromLatticeCoords(0.62, 0.18)};
        std::vector<Complex> ps = {curve.fromLatticeCoords(0.47, 0.71),
                                   curve.fromLatticeCoords(0.84, 0.52)};
        for (int k = 1; k <= 3; ++k)
            for (Complex w : ws)
                for (Complex p : ps)
                    worst = std::max(worst, std::abs(fam.fkw(k, w, p) - base.fkw(k, w, p)));
        return worst;
    };
    ContinuityReport rep;
    rep.deviationCoarse = (eps == 0.0) ? 0.0 : deviation(eps);
    rep.deviationFine = (eps == 0.0) ? 0.0 : deviation(eps / 10.0);
    rep.slopeRatio = (rep.deviationFine > 0.0) ? rep.deviationCoarse / rep.deviationFine : 0.0;
    return rep;
}

}  // namespace mtriv
