// Genus-1 prime form, flat-line-bundle Cauchy kernels, and the canonical
// functions f_{kw} with divisor bound (f) + D0 + kw >= 0 and principal part
// z^{-k} at w. Each object is built two independent ways and the pair is the
// module's oracle: the kernel composition route and the direct theta-quotient
// route must agree wherever both are defined.
#pragma once

#include <optional>
#include <vector>

#include "mtriv/divisors.hpp"
#include "mtriv/maps.hpp"
#include "mtriv/theta.hpp"

namespace mtriv {

// Flat unitary line bundle with action exp(-2 pi i a) on the period-1 cycle
// and exp(2 pi i b) on the period-tau cycle; be = b + tau a.
class FlatLineBundle {
public:
    FlatLineBundle() = default;
    FlatLineBundle(double a, double b)
        : a_(a - std::floor(a)), b_(b - std::floor(b)) {}

    double a() const { return a_; }
    double b() const { return b_; }
    Complex be(const EllipticCurve& curve) const { return b_ + curve.tau() * a_; }

    // Lattice-basis decomposition of a target be value, reduced mod 1.
    static FlatLineBundle fromBe(const EllipticCurve& curve, Complex be) {
        LatticeCoords c = curve.latticeCoords(be);
        return FlatLineBundle(c.t, c.s);
    }

private:
    double a_ = 0.0, b_ = 0.0;
};

class PrimeFormEvaluator {
public:
    explicit PrimeFormEvaluator(const ThetaEvaluator& ev);

    const ThetaEvaluator& thetaEvaluator() const { return ev_; }
    const EllipticCurve& curve() const { return ev_.curve(); }

    // theta[1/2,1/2](z) and its z-derivatives; odd, vanishing exactly on the
    // lattice.
    Complex thetaOdd(Complex z) const { return ev_.thetaCharDeriv(oddChar_, z, 0); }
    Complex thetaOddDeriv(Complex z, int k) const { return ev_.thetaCharDeriv(oddChar_, z, k); }
    Complex oddDerivAtZero() const { return d0_; }

    // E(p,q) = theta[1/2,1/2](q - p) / theta[1/2,1/2]'(0). Antisymmetric,
    // vanishing iff p = q mod the lattice, slope 1 on the diagonal.
    Complex operator()(Complex p, Complex q) const { return thetaOdd(q - p) / d0_; }

private:
    ThetaEvaluator ev_;
    Characteristic oddChar_{0.5, 0.5};
    Complex d0_;
};

// K(chi; p, q) = theta[a,b](q-p) / (theta[a,b](0) E(q,p)). Simple pole on the
// diagonal with residue 1 in the first argument.
Complex cauchyKernel(const PrimeFormEvaluator& E, const FlatLineBundle& chi, Complex p, Complex q);
// The same kernel through the reduction of theta[a,b] to theta(. + be).
Complex cauchyKernelViaTheta(const PrimeFormEvaluator& E, const FlatLineBundle& chi, Complex p,
                             Complex q);

// Canonical functions attached to a base divisor D0 = p1 - p0. The flat bundle
// identification places be at p1 - p0 + (1+tau)/2 modulo the lattice.
class CanonicalFunctions {
public:
    CanonicalFunctions(const ThetaEvaluator& ev, const BaseDivisor& d0);

    const EllipticCurve& curve() const { return prime_.curve(); }
    const PrimeFormEvaluator& primeForm() const { return prime_; }
    const FlatLineBundle& bundle() const { return bundle_; }
    Complex be() const { return be_; }
    Complex p0() const { return p0_; }
    Complex p1() const { return p1_; }

    // f_w(p) via the Cauchy-kernel composition.
    Complex fwViaKernels(Complex w, Complex p) const;
    // f_w(p) via the direct theta quotient with the fourth point w + p1 - p0.
    Complex fwDirect(Complex w, Complex p) const;
    // f_w(p) via the expanded theta/prime-form formula (the production route).
    Complex fw(Complex w, Complex p) const;

    // (1/(k-1)!) d^{k-1}/dw^{k-1} f_w(p), computed from exact theta jets.
    Complex fkw(int k, Complex w, Complex p) const;
    // Same object differentiated m more times in the evaluation point:
    // (1/m!) d^m/dp^m f_{kw}(p).
    Complex fkwDp(int k, int m, Complex w, Complex p) const;

    // f_{w,A} = sum_k f_{kw} A^{k-1} for nilpotent A; the difference
    // f_{w,A}(u) - ((u-w) I - A)^{-1} is analytic at w.
    Mat fwA(const Mat& A, Complex w, Complex p) const;

    int maxOrder() const { return 6; }

private:
    PrimeFormEvaluator prime_;
    FlatLineBundle bundle_;
    Complex be_;  // reduced representative b + tau a
    Complex p0_, p1_;
};

// Contour residue in the base-point variable: p0 -> f^{(d - p0)}_w(p) has a
// simple pole at p0 = w with residue -1.
Complex residueInBasePoint(const ThetaEvaluator& ev, Complex d, Complex w, Complex p,
                           double radius = 0.05, int nodes = 256);

struct ContinuityReport {
    double deviationCoarse = 0.0;  // at epsilon
    double deviationFine = 0.0;    // at epsilon / 10
    double slopeRatio = 0.0;       // coarse / fine, ~10 for linear response
};

// Deviation of f_{kw}(p) under a support perturbation p1 -> p1 + eps, sampled
// over a few (k, w, p) triples.
ContinuityReport continuitySpotCheck(const ThetaEvaluator& ev, const BaseDivisor& d0, double eps);

}  // namespace mtriv
