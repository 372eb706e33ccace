#include "mtriv/divisors.hpp"

namespace mtriv {

MatrixDivisor::MatrixDivisor(const EllipticCurve& curve, int r,
                             std::vector<std::pair<TorusPoint, SylvesterDataSet>> entries,
                             const Tolerances& tol)
    : r_(r), entries_(std::move(entries)) {
    for (auto& e : entries_) {
        if (e.second.trivial())
            throw std::invalid_argument("MatrixDivisor: trivial data sets must be omitted");
        if (e.second.r != r)
            throw std::invalid_argument("MatrixDivisor: data set rank mismatch");
        AdmissibilityReport rep = isAdmissible(e.second, tol);
        if (!rep.ok)
            throw std::invalid_argument("MatrixDivisor: inadmissible data set (" + rep.failure + ")");
    }
    for (size_t i = 0; i < entries_.size(); ++i)
        for (size_t j = i + 1; j < entries_.size(); ++j)
            if (latticeEquivalent(curve, entries_[i].first.rep(), entries_[j].first.rep(),
                                  tol.lattice))
                throw std::invalid_argument("MatrixDivisor: support points must be distinct");
}

MatrixDivisor MatrixDivisor::fromSimpleData(const EllipticCurve& curve, int r,
                                            const SimpleNullPoleData& d) {
    d.validate(curve);
    return MatrixDivisor(curve, r, simpleToDivisorEntries(d, r));
}

int degree(const MatrixDivisor& D) {
    int deg = 0;
    for (const auto& e : D.entries()) deg += e.second.nullSize() - e.second.poleSize();
    return deg;
}

IndexPartition partition(const MatrixDivisor& D) {
    IndexPartition p;
    const auto& es = D.entries();
    for (int i = 0; i < int(es.size()); ++i) {
        const auto& T = es[i].second;
        if (T.poleSize() > 0 && T.nullSize() == 0) {
            p.I.push_back(i);
            ++p.nInf;
        } else if (T.poleSize() > 0 && T.nullSize() > 0) {
            p.II.push_back(i);
            ++p.nC;
        } else {
            p.III.push_back(i);
            ++p.n0;
        }
    }
    return p;
}

MatrixDivisor adjointDivisor(const MatrixDivisor& D) {
    // Support is unchanged and the adjoint of an admissible set is admissible,
    // so the checked constructor is not needed here.
    std::vector<std::pair<TorusPoint, SylvesterDataSet>> entries;
    for (const auto& e : D.entries()) entries.emplace_back(e.first, adjoint(e.second));
    return MatrixDivisor(D.rank(), std::move(entries), true);
}

bool isCDAdmissible(const EllipticCurve& curve, const BaseDivisor& D0, const MatrixDivisor& D,
                    double tol) {
    for (const auto& e : D.entries()) {
        if (latticeEquivalent(curve, e.first.rep(), D0.p0.rep(), tol)) return false;
        if (latticeEquivalent(curve, e.first.rep(), D0.p1.rep(), tol)) return false;
    }
    return true;
}

}  // namespace mtriv
