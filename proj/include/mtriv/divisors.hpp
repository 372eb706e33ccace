// Right matrix null-pole divisors: finite-support maps from torus points to
// admissible Sylvester data sets, their degree, the I/II/III index partition,
// and admissible base divisors p1 - p0 used to anchor canonical functions.
#pragma once

#include <vector>

#include "mtriv/nullpole.hpp"
#include "mtriv/torus.hpp"

namespace mtriv {

class MatrixDivisor {
public:
    MatrixDivisor(const EllipticCurve& curve, int r,
                  std::vector<std::pair<TorusPoint, SylvesterDataSet>> entries,
                  const Tolerances& tol = Tolerances::defaults());

    int rank() const { return r_; }
    const std::vector<std::pair<TorusPoint, SylvesterDataSet>>& entries() const { return entries_; }
    int size() const { return int(entries_.size()); }

    static MatrixDivisor fromSimpleData(const EllipticCurve& curve, int r,
                                        const SimpleNullPoleData& d);

private:
    MatrixDivisor(int r, std::vector<std::pair<TorusPoint, SylvesterDataSet>> entries, bool)
        : r_(r), entries_(std::move(entries)) {}
    friend MatrixDivisor adjointDivisor(const MatrixDivisor&);

    int r_;
    std::vector<std::pair<TorusPoint, SylvesterDataSet>> entries_;
};

// I: pole only. II: pole and zero. III: zero only. Counts follow:
// nP = nInf + nC (points with a pole), nZ = n0 + nC (points with a zero).
struct IndexPartition {
    std::vector<int> I, II, III;  // indices into divisor entries
    int nInf = 0, nC = 0, n0 = 0;
    int nP() const { return nInf + nC; }
    int nZ() const { return n0 + nC; }
};

int degree(const MatrixDivisor& D);
IndexPartition partition(const MatrixDivisor& D);
MatrixDivisor adjointDivisor(const MatrixDivisor& D);

// Degree-0 base data p1 - p0 (genus 1: the positive part is a single point,
// automatically nonspecial).
struct BaseDivisor {
    TorusPoint p1;
    TorusPoint p0;

    BaseDivisor(const EllipticCurve& curve, TorusPoint p1_, TorusPoint p0_, double tol = 1e-9)
        : p1(p1_), p0(p0_) {
        if (latticeEquivalent(curve, p1.rep(), p0.rep(), tol))
            throw std::invalid_argument("BaseDivisor: p0 and p1 must be distinct");
    }
};

// True iff {p0, p1} is disjoint from the divisor support.
bool isCDAdmissible(const EllipticCurve& curve, const BaseDivisor& D0, const MatrixDivisor& D,
                    double tol = 1e-9);

}  // namespace mtriv
