#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "mtriv/divisors.hpp"

using namespace mtriv;
using mtriv::testing::squareCurve;

namespace {

MatrixDivisor sampleDivisor(const EllipticCurve& curve) {
    SimpleNullPoleData d;
    Col one = Col::Ones(1);
    d.zeros.push_back({TorusPoint(curve, Complex(0.2, 0.2)), one});
    d.zeros.push_back({TorusPoint(curve, Complex(0.6, 0.4)), one});
    d.zeros.push_back({TorusPoint(curve, Complex(0.1, 0.7)), one});
    d.poles.push_back({TorusPoint(curve, Complex(0.8, 0.1)), one});
    d.poles.push_back({TorusPoint(curve, Complex(0.4, 0.8)), one});
    d.poles.push_back({TorusPoint(curve, Complex(0.9, 0.55)), one});
    return MatrixDivisor::fromSimpleData(curve, 1, d);
}

SylvesterDataSet coupledSet() {
    return SylvesterDataSet::make(2, (Mat(2, 1) << 0, 1).finished(), Mat::Zero(1, 1),
                                  Mat::Zero(1, 1), (Mat(1, 2) << 1, 0).finished(),
                                  Mat::Ones(1, 1));
}

}  // namespace

TEST_CASE("degree") {
    EllipticCurve curve = squareCurve();
    CHECK(degree(MatrixDivisor(curve, 1, {})) == 0);
    CHECK(degree(sampleDivisor(curve)) == 0);
    // one pole-only entry with a 2-dimensional pole space
    Mat Api = (Mat(2, 2) << 0, 1, 0, 0).finished();
    Mat Cpi = (Mat(2, 1) << 0, 1).finished();
    SylvesterDataSet T = SylvesterDataSet::make(1, Mat::Zero(1, 0), Mat::Zero(0, 0), Api, Cpi,
                                                Mat::Zero(2, 0));
    MatrixDivisor D(curve, 1, {{TorusPoint(curve, Complex(0.3, 0.3)), T}});
    CHECK(degree(D) == -2);
}

TEST_CASE("index partition") {
    EllipticCurve curve = squareCurve();
    SUBCASE("all-simple data splits into pole-only and zero-only classes") {
        IndexPartition p = partition(sampleDivisor(curve));
        CHECK(p.I.size() == 3);
        CHECK(p.III.size() == 3);
        CHECK(p.II.empty());
        CHECK(p.nP() == 3);
        CHECK(p.nZ() == 3);
    }
    SUBCASE("a two-sided entry lands in the middle class") {
        MatrixDivisor D(curve, 2, {{TorusPoint(curve, Complex(0.5, 0.5)), coupledSet()}});
        IndexPartition p = partition(D);
        CHECK(p.II.size() == 1);
        CHECK(p.nC == 1);
        CHECK(p.nP() == 1);
        CHECK(p.nZ() == 1);
    }
    SUBCASE("empty divisor") {
        IndexPartition p = partition(MatrixDivisor(curve, 1, {}));
        CHECK(p.I.empty());
        CHECK(p.II.empty());
        CHECK(p.III.empty());
    }
}

TEST_CASE("base divisor admissibility") {
    EllipticCurve curve = squareCurve();
    MatrixDivisor D = sampleDivisor(curve);
    BaseDivisor good(curve, TorusPoint(curve, Complex(0.0, 0.8)),
                     TorusPoint(curve, Complex(0.9, 0.0)));
    CHECK(isCDAdmissible(curve, good, D));
    BaseDivisor onSupport(curve, TorusPoint(curve, Complex(0.2, 0.2)),
                          TorusPoint(curve, Complex(0.9, 0.0)));
    CHECK_FALSE(isCDAdmissible(curve, onSupport, D));
    CHECK_THROWS_AS(BaseDivisor(curve, TorusPoint(curve, Complex(0.3, 0.3)),
                                TorusPoint(curve, Complex(0.3, 0.3))),
                    std::invalid_argument);
}

TEST_CASE("divisor validation") {
    EllipticCurve curve = squareCurve();
    SUBCASE("trivial sets are rejected") {
        CHECK_THROWS_AS(MatrixDivisor(curve, 1,
                                      {{TorusPoint(curve, 0.1), SylvesterDataSet::empty(1)}}),
                        std::invalid_argument);
    }
    SUBCASE("coincident support is rejected") {
        Col one = Col::Ones(1);
        CHECK_THROWS_AS(
            MatrixDivisor(curve, 1,
                          {{TorusPoint(curve, Complex(0.3, 0.3)), SylvesterDataSet::nullOnly(one)},
                           {TorusPoint(curve, Complex(1.3, 0.3)), SylvesterDataSet::poleOnly(
                                                                      one.transpose())}}),
            std::invalid_argument);
    }
    SUBCASE("inadmissible sets are rejected") {
        SylvesterDataSet bad = SylvesterDataSet::make(1, Mat::Zero(1, 0), Mat::Zero(0, 0),
                                                      Mat::Identity(1, 1), Mat::Ones(1, 1),
                                                      Mat::Zero(1, 0));
        CHECK_THROWS_AS(MatrixDivisor(curve, 1, {{TorusPoint(curve, 0.1), bad}}),
                        std::invalid_argument);
    }
}

TEST_CASE("adjoint divisor") {
    EllipticCurve curve = squareCurve();
    CHECK(adjointDivisor(MatrixDivisor(curve, 1, {})).size() == 0);
    std::mt19937_64 rng(7);
    MatrixDivisor D(curve, 2, {{TorusPoint(curve, Complex(0.5, 0.5)), coupledSet()},
                               {TorusPoint(curve, Complex(0.15, 0.75)),
                                SylvesterDataSet::nullOnly((Col(2) << 1, 1).finished())}});
    MatrixDivisor A = adjointDivisor(D);
    CHECK(degree(A) == -degree(D));
    for (const auto& e : A.entries()) CHECK(isAdmissible(e.second).ok);
    MatrixDivisor back = adjointDivisor(A);
    for (size_t i = 0; i < back.entries().size(); ++i) {
        CHECK((back.entries()[i].second.Bz - D.entries()[i].second.Bz).norm() == 0.0);
        CHECK((back.entries()[i].second.S - D.entries()[i].second.S).norm() == 0.0);
    }
}
