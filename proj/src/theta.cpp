#include "mtriv/theta.hpp"

#include <Eigen/LU>
#include <cmath>

namespace mtriv {

namespace {
Complex ipow(Complex base, int k) {
    Complex r = 1.0;
    for (int i = 0; i < k; ++i) r *= base;
    return r;
}
}  // namespace

ThetaEvaluator::ThetaEvaluator(const EllipticCurve& curve, double tailTol, double stripBound,
                               int maxDeriv)
    : curve_(curve), tailTol_(tailTol), strip_(stripBound), maxDeriv_(maxDeriv) {
    if (tailTol <= 0.0) throw std::invalid_argument("ThetaEvaluator: tailTol must be positive");
    if (maxDeriv < 0 || maxDeriv > 12)
        throw std::invalid_argument("ThetaEvaluator: unsupported derivative order cap");
    if (strip_ <= 0.0) strip_ = 5.0 * curve.tau().imag() + 3.0;
    trunc_ = truncationFor(strip_, tailTol_, maxDeriv_);
}

int ThetaEvaluator::truncationFor(double effStrip, double tol, int derivOrder) const {
    const double y = curve_.tau().imag();
    const double target = tol * (1.0 - std::exp(-kPi * y));
    for (int n = 1; n < 4000; ++n) {
        double logTerm = -kPi * y * double(n) * double(n) + 2.0 * kPi * double(n) * effStrip +
                         derivOrder * std::log(2.0 * kPi * double(n + 1));
        bool decreasing = 2.0 * kPi * y * double(n) > 2.0 * kPi * effStrip + derivOrder;
        if (decreasing && logTerm < std::log(target)) return n;
    }
    throw std::runtime_error("ThetaEvaluator: truncation bound search failed (strip too wide?)");
}

void ThetaEvaluator::checkStrip(Complex u) const {
    if (std::abs(u.imag()) > strip_)
        throw StripError(
            "theta argument outside the working strip |Im u| <= " + std::to_string(strip_) +
            "; pre-reduce the argument with the quasi-periodicity relations");
}

Complex ThetaEvaluator::theta(Complex u) const { return thetaDeriv(u, 0); }

Complex ThetaEvaluator::thetaDeriv(Complex u, int k) const {
    checkStrip(u);
    if (k < 0 || k > maxDeriv_)
        throw std::invalid_argument("thetaDeriv: derivative order exceeds the configured cap");
    const Complex tau = curve_.tau();
    // Terms n and -n are paired so that evenness (k even) and oddness (k odd)
    // hold exactly as computed.
    Complex sum = (k == 0) ? Complex(1.0) : Complex(0.0);
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (int n = 1; n <= trunc_; ++n) {
        Complex gauss = std::exp(kTwoPiI * (0.5 * double(n) * double(n) * tau));
        Complex osc = std::exp(kTwoPiI * double(n) * u);
        Complex oscNeg = std::exp(-kTwoPiI * double(n) * u);
        Complex factor = ipow(kTwoPiI * double(n), k);
        sum += factor * gauss * (osc + sign * oscNeg);
    }
    return sum;
}

Complex ThetaEvaluator::thetaChar(const Characteristic& ch, Complex z) const {
    return thetaCharDeriv(ch, z, 0);
}

Complex ThetaEvaluator::thetaCharDeriv(const Characteristic& ch, Complex z, int k) const {
    checkStrip(z);
    if (k < 0 || k > maxDeriv_)
        throw std::invalid_argument("thetaCharDeriv: derivative order exceeds the configured cap");
    const Complex tau = curve_.tau();
    const Complex piI(0.0, kPi);
    Complex sum = 0.0;
    for (int m = -trunc_ - 1; m <= trunc_ + 1; ++m) {
        double ma = double(m) + ch.a;
        Complex term = std::exp(piI * tau * ma * ma + kTwoPiI * (z + ch.b) * ma);
        sum += ipow(kTwoPiI * ma, k) * term;
    }
    return sum;
}

Complex ThetaEvaluator::thetaCharReduced(const Characteristic& ch, Complex z) const {
    const Complex tau = curve_.tau();
    const Complex piI(0.0, kPi);
    Complex shift = z + tau * ch.a + ch.b;
    return std::exp(piI * tau * ch.a * ch.a + kTwoPiI * (z + ch.b) * ch.a) * theta(shift);
}

Mat ThetaEvaluator::matrixThetaTriv(const Mat& V, Complex u) const {
    checkStrip(u);
    const int r = int(V.rows());
    if (V.cols() != r) throw std::invalid_argument("matrixThetaTriv: V must be square");
    Eigen::FullPivLU<Mat> lu(V);
    if (!lu.isInvertible()) throw std::invalid_argument("matrixThetaTriv: V is numerically singular");
    if (latticeEquivalent(curve_, u, halfPeriodSum(), 1e-6))
        throw PoleError("matrixThetaTriv: u is at a zero of theta (pole of the trivialization)");

    const Mat W = lu.inverse();
    // Enlarge the truncation to absorb the growth of ||V^{+-n}||.
    double rho = std::max({1.0, V.norm(), W.norm()});
    int n1 = truncationFor(strip_ + std::log(rho) / (2.0 * kPi), tailTol_, 0);

    const Complex tau = curve_.tau();
    Mat sum = Mat::Identity(r, r);  // n = 0 term
    Mat powW = Mat::Identity(r, r), powV = Mat::Identity(r, r);
    for (int n = 1; n <= n1; ++n) {
        powW *= W;  // V^{-n}
        powV *= V;  // V^{+n} = V^{-(-n)}
        Complex gauss = std::exp(kTwoPiI * (0.5 * double(n) * double(n) * tau));
        sum += gauss * (std::exp(kTwoPiI * double(n) * u) * powW +
                        std::exp(-kTwoPiI * double(n) * u) * powV);
    }
    Complex th = theta(u);
    if (std::abs(th) < 1e-12)
        throw PoleError("matrixThetaTriv: theta(u) vanishes to working precision");
    return sum / th;
}

}  // namespace mtriv
