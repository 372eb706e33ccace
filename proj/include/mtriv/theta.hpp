// Numerical evaluation of the genus-1 theta function
//
//   theta(u) = sum_n exp(2 pi i (n^2 tau / 2 + n u)),
//
// its u-derivatives, theta with real characteristics, and the matrix theta
// series theta(u)^{-1} sum_n V^{-n} exp(2 pi i (n^2 tau/2 + n u)).
//
// The series is truncated at |n| <= N with N chosen so the Gaussian tail bound
// over the working strip |Im u| <= strip is below tailTol, including the
// (2 pi n)^k inflation for derivatives up to the configured order. Arguments
// outside the strip are refused rather than evaluated at reduced accuracy;
// callers reduce with the quasi-periodicity relations first.
#pragma once

#include <complex>
#include <stdexcept>

#include "mtriv/numerics.hpp"
#include "mtriv/torus.hpp"

namespace mtriv {

struct StripError : std::domain_error {
    using std::domain_error::domain_error;
};
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Real characteristic (a, b), reduced mod 1.
struct Characteristic {
    double a = 0.0;
    double b = 0.0;
    Characteristic() = default;
    Characteristic(double a_, double b_) : a(a_ - std::floor(a_)), b(b_ - std::floor(b_)) {}
};

class ThetaEvaluator {
public:
    explicit ThetaEvaluator(const EllipticCurve& curve, double tailTol = 1e-12,
                            double stripBound = -1.0, int maxDeriv = 8);

    const EllipticCurve& curve() const { return curve_; }
    int truncation() const { return trunc_; }
    double tailTol() const { return tailTol_; }
    double stripBound() const { return strip_; }
    int maxDerivOrder() const { return maxDeriv_; }

    // Half-period sum (1 + tau)/2, the zero of theta in the fundamental domain.
    Complex halfPeriodSum() const { return 0.5 * (1.0 + curve_.tau()); }

    Complex theta(Complex u) const;
    Complex thetaDeriv(Complex u, int k) const;

    // theta[a,b](z) = sum_m exp(pi i tau (m+a)^2 + 2 pi i (z+b)(m+a)), and its
    // z-derivatives.
    Complex thetaChar(const Characteristic& ch, Complex z) const;
    Complex thetaCharDeriv(const Characteristic& ch, Complex z, int k) const;
    // The same value through the reduction to theta(z + tau a + b); used as a
    // cross-check of the direct series.
    Complex thetaCharReduced(const Characteristic& ch, Complex z) const;

    // theta(u)^{-1} sum_{|n|<=N} V^{-n} exp(2 pi i (n^2 tau/2 + n u)).
    Mat matrixThetaTriv(const Mat& V, Complex u) const;

private:
    void checkStrip(Complex u) const;
    int truncationFor(double effStrip, double tol, int derivOrder) const;

    EllipticCurve curve_;
    double tailTol_;
    double strip_;
    int maxDeriv_;
    int trunc_;
};

}  // namespace mtriv
