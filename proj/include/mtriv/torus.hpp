// Arithmetic on the torus C/(Z + tau Z): lattice reduction, point identity
// modulo the lattice, and the deck-group action u -> u + m + n*tau.
#pragma once

#include <complex>
#include <stdexcept>

namespace mtriv {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline const Complex kTwoPiI{0.0, 2.0 * kPi};

// Coordinates of u in the basis (1, tau): u = s + t*tau.
struct LatticeCoords {
    double s;
    double t;
};

class EllipticCurve {
public:
    explicit EllipticCurve(Complex tau) : tau_(tau) {
        if (!(tau.imag() > 0.0))
            throw std::domain_error("EllipticCurve: Im(tau) must be strictly positive");
    }

    Complex tau() const { return tau_; }

    LatticeCoords latticeCoords(Complex u) const {
        double t = u.imag() / tau_.imag();
        double s = u.real() - t * tau_.real();
        return {s, t};
    }

    Complex fromLatticeCoords(double s, double t) const { return Complex(s, 0.0) + t * tau_; }

    // Distance in basis coordinates to the nearest lattice point of u - v.
    double latticeDistance(Complex u, Complex v) const {
        LatticeCoords c = latticeCoords(u - v);
        double ds = c.s - std::round(c.s);
        double dt = c.t - std::round(c.t);
        return std::hypot(ds, dt);
    }

private:
    Complex tau_;
};

// Unique representative s + t*tau with s, t in [0, 1).
class TorusPoint {
public:
    TorusPoint() : rep_(0.0) {}
    TorusPoint(const EllipticCurve& curve, Complex u) { reduceFrom(curve, u); }

    Complex rep() const { return rep_; }

private:
    void reduceFrom(const EllipticCurve& curve, Complex u) {
        LatticeCoords c = curve.latticeCoords(u);
        double m = std::floor(c.s);
        double n = std::floor(c.t);
        rep_ = u - m - n * curve.tau();
        // Guard against representatives landing a hair outside [0,1) from rounding.
        LatticeCoords r = curve.latticeCoords(rep_);
        if (r.s >= 1.0) rep_ -= 1.0;
        if (r.s < 0.0) rep_ += 1.0;
        if (r.t >= 1.0) rep_ -= curve.tau();
        if (r.t < 0.0) rep_ += curve.tau();
    }

    Complex rep_;
};

inline TorusPoint reduce(const EllipticCurve& curve, Complex u) { return TorusPoint(curve, u); }

inline bool latticeEquivalent(const EllipticCurve& curve, Complex u, Complex v, double tol = 1e-9) {
    if (!(tol > 0.0)) throw std::invalid_argument("latticeEquivalent: tol must be positive");
    return curve.latticeDistance(u, v) <= tol;
}

inline Complex deckTranslate(const EllipticCurve& curve, Complex u, long m, long n) {
    return u + static_cast<double>(m) + static_cast<double>(n) * curve.tau();
}

}  // namespace mtriv
