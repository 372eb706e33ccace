#include "mtriv/scenario.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "mtriv/kernels.hpp"
#include "mtriv/nullpole.hpp"
#include "mtriv/trivialize.hpp"

namespace mtriv {

using nlohmann::json;

Complex parseComplex(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ScenarioError("expected a complex number as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json complexToJson(Complex z) { return json::array({z.real(), z.imag()}); }

Mat parseMatrix(const json& j, int rows, int cols) {
    Mat m = Mat::Zero(rows, cols);
    if (rows == 0 || cols == 0) {
        if (!j.is_null() && !(j.is_array() && j.empty())) {
            // allow [] or omission for empty blocks
            if (!(j.is_array() && j.size() == size_t(rows)))
                throw ScenarioError("expected an empty matrix");
        }
        return m;
    }
    if (!j.is_array() || j.size() != size_t(rows))
        throw ScenarioError("matrix row count mismatch");
    for (int i = 0; i < rows; ++i) {
        const json& row = j[size_t(i)];
        if (!row.is_array() || row.size() != size_t(cols))
            throw ScenarioError("matrix column count mismatch");
        for (int k = 0; k < cols; ++k) m(i, k) = parseComplex(row[size_t(k)]);
    }
    return m;
}

json matrixToJson(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j2 = 0; j2 < m.cols(); ++j2) row.push_back(complexToJson(m(i, j2)));
        rows.push_back(row);
    }
    return rows;
}

namespace {

TorusPoint parsePoint(const EllipticCurve& curve, const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ScenarioError("expected a torus point as lattice coordinates [s, t]");
    return TorusPoint(curve, curve.fromLatticeCoords(j[0].get<double>(), j[1].get<double>()));
}

int blockDim(const json& j) {
    if (j.is_null()) return 0;
    if (!j.is_array()) throw ScenarioError("expected a matrix (array of rows)");
    return int(j.size());
}

}  // namespace

MatrixDivisor parseDivisor(const EllipticCurve& curve, const json& j) {
    if (!j.is_object() || !j.contains("rank") || !j.contains("entries"))
        throw ScenarioError("divisor needs 'rank' and 'entries'");
    int r = j["rank"].get<int>();
    std::vector<std::pair<TorusPoint, SylvesterDataSet>> entries;
    for (const json& e : j["entries"]) {
        TorusPoint at = parsePoint(curve, e.at("point"));
        int nz = blockDim(e.contains("Az") ? e["Az"] : json());
        int np = blockDim(e.contains("Api") ? e["Api"] : json());
        SylvesterDataSet T = SylvesterDataSet::make(
            r, parseMatrix(e.contains("Bz") ? e["Bz"] : json(), r, nz),
            parseMatrix(e.contains("Az") ? e["Az"] : json(), nz, nz),
            parseMatrix(e.contains("Api") ? e["Api"] : json(), np, np),
            parseMatrix(e.contains("Cpi") ? e["Cpi"] : json(), np, r),
            parseMatrix(e.contains("S") ? e["S"] : json(), np, nz));
        entries.emplace_back(at, T);
    }
    return MatrixDivisor(curve, r, std::move(entries));
}

SimpleNullPoleData parseSimpleData(const EllipticCurve& curve, const json& j, int r) {
    SimpleNullPoleData d;
    for (const json& z : j.at("zeros")) {
        Col x(r);
        const json& v = z.at("vector");
        if (int(v.size()) != r) throw ScenarioError("zero vector length mismatch");
        for (int i = 0; i < r; ++i) x(i) = parseComplex(v[size_t(i)]);
        d.zeros.push_back({parsePoint(curve, z.at("point")), x});
    }
    for (const json& p : j.at("poles")) {
        Col y(r);
        const json& v = p.at("vector");
        if (int(v.size()) != r) throw ScenarioError("pole vector length mismatch");
        for (int i = 0; i < r; ++i) y(i) = parseComplex(v[size_t(i)]);
        d.poles.push_back({parsePoint(curve, p.at("point")), y});
    }
    d.validate(curve);
    return d;
}

BaseDivisor parseBaseDivisor(const EllipticCurve& curve, const json& j) {
    return BaseDivisor(curve, parsePoint(curve, j.at("p1")), parsePoint(curve, j.at("p0")));
}

Scenario loadScenario(const json& doc) {
    Scenario s;
    s.raw = doc;
    if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
    if (!doc.contains("pipeline") || !doc["pipeline"].is_string())
        throw ScenarioError("scenario needs a 'pipeline' string");
    s.pipeline = doc["pipeline"].get<std::string>();
    if (doc.contains("tau")) s.tau = parseComplex(doc["tau"]);
    if (!(s.tau.imag() > 0.0)) throw ScenarioError("tau must have positive imaginary part");
    if (doc.contains("seed")) s.seed = doc["seed"].get<std::uint64_t>();

    json numeric = json::object();
    if (const char* cfg = std::getenv("MTRIV_CONFIG")) {
        std::ifstream in(cfg);
        if (in) {
            json defaults = json::parse(in, nullptr, false);
            if (!defaults.is_discarded() && defaults.contains("numeric"))
                numeric = defaults["numeric"];
        }
    }
    if (doc.contains("numeric"))
        for (auto& [k, v] : doc["numeric"].items()) numeric[k] = v;
    if (numeric.contains("tail_tol")) s.tailTol = numeric["tail_tol"].get<double>();
    if (numeric.contains("tol")) {
        s.tol = numeric["tol"].get<double>();
        s.tolExplicit = true;
    }
    if (numeric.contains("contour_nodes")) s.contourNodes = numeric["contour_nodes"].get<int>();
    if (s.tailTol <= 0 || s.tol <= 0 || s.contourNodes < 8)
        throw ScenarioError("invalid numeric configuration");

    s.inputs = doc.contains("inputs") ? doc["inputs"] : json::object();
    s.samples = doc.contains("samples") ? doc["samples"] : json::object();
    return s;
}

Scenario loadScenarioFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw ScenarioError("scenario file is not valid JSON: " + path);
    return loadScenario(doc);
}

namespace {

struct Ctx {
    const Scenario& s;
    EllipticCurve curve;
    ThetaEvaluator ev;
    json results = json::object();
    bool pass = true;
    std::vector<std::string> failures;

    explicit Ctx(const Scenario& sc)
        : s(sc), curve(sc.tau), ev(EllipticCurve(sc.tau), sc.tailTol) {}

    void check(const std::string& name, double value, double bound) {
        if (s.tolExplicit) bound = s.tol;
        results[name] = value;
        results[name + "_bound"] = bound;
        if (!(value < bound)) {
            pass = false;
            failures.push_back(name + " = " + std::to_string(value));
        }
    }
};

FlatFactor parseFactor(const json& j) {
    if (!j.is_object() || !j.contains("blocks")) throw ScenarioError("factor needs 'blocks'");
    std::vector<JordanBlockSpec> blocks;
    for (const json& b : j["blocks"])
        blocks.push_back({parseComplex(b.at("alpha")), b.at("size").get<int>()});
    return FlatFactor(blocks);
}

void pipelineThetaCheck(Ctx& c) {
    std::mt19937_64 rng(c.s.seed);
    std::uniform_real_distribution<double> uni(-0.4, 0.4);
    const Complex tau = c.curve.tau();
    double quasi = 0.0, even = 0.0, stability = 0.0, charAgree = 0.0;
    ThetaEvaluator finer(c.curve, c.s.tailTol * 0.5);
    for (int t = 0; t < 24; ++t) {
        Complex u(uni(rng), uni(rng) * tau.imag());
        Complex th = c.ev.theta(u);
        double scale = std::max(1.0, std::abs(th));
        quasi = std::max(quasi, std::abs(c.ev.theta(u + 1.0) - th) / scale);
        quasi = std::max(quasi,
                         std::abs(c.ev.theta(u + tau) -
                                  std::exp(Complex(0, -kPi) * tau - kTwoPiI * u) * th) / scale);
        even = std::max(even, std::abs(c.ev.theta(-u) - th) / scale);
        stability = std::max(stability, std::abs(finer.theta(u) - th) / scale);
        Characteristic ch(0.23, 0.57);
        charAgree = std::max(charAgree,
                             std::abs(c.ev.thetaChar(ch, u) - c.ev.thetaCharReduced(ch, u)) / scale);
    }
    c.check("quasi_periodicity_residual", quasi, 1e-10);
    c.check("evenness_residual", even, 1e-12);
    c.check("zero_at_half_period", std::abs(c.ev.theta(c.ev.halfPeriodSum())), 1e-10);
    c.check("truncation_stability", stability, 1e-12);
    c.check("characteristic_reduction_residual", charAgree, 1e-10);
}

void pipelineTrivialize(Ctx& c, PipelineOutcome& out) {
    FlatFactor factor = c.s.inputs.contains("factor")
                            ? parseFactor(c.s.inputs["factor"])
                            : FlatFactor::jordan(parseComplex(c.s.inputs.at("alpha")),
                                                 c.s.inputs.value("rank", 2));
    if (factor.blocks().size() != 1)
        throw ScenarioError("trivialize pipeline handles one Jordan block per run");
    Complex alpha = factor.blocks()[0].alpha;
    int r = factor.blocks()[0].size;
    MeromorphicMatrixMap G = blockThetaTriv(c.ev, alpha, r);
    c.check("block_automorphy_residual", verifyAutomorphy(G, factor, c.curve, 20, c.s.seed), 1e-7);
    MeromorphicMatrixMap P = singlePoleTriv(c.ev, alpha, r, 0.0);
    c.check("single_pole_automorphy_residual",
            verifyAutomorphy(P, *P.factor(), c.curve, 20, c.s.seed), 1e-7);
    // Agreement of the two theta-based routes.
    Mat V = factor.monodromy();
    std::mt19937_64 rng(c.s.seed);
    std::uniform_real_distribution<double> uni(0.08, 0.92);
    double agree = 0.0;
    for (int t = 0; t < 20; ++t) {
        Complex u = c.curve.fromLatticeCoords(uni(rng), uni(rng));
        if (c.curve.latticeDistance(u, c.ev.halfPeriodSum()) < 0.08) continue;
        Mat a = G(u), b = c.ev.matrixThetaTriv(V, u);
        agree = std::max(agree, (a - b).norm() / std::max(1.0, a.norm()));
    }
    c.check("construction_agreement", agree, 1e-8);
    out.sampleFn = G;
}

void pipelineExtend(Ctx& c, PipelineOutcome& out) {
    Complex alpha = parseComplex(c.s.inputs.at("alpha"));
    int targetRank = c.s.inputs.value("rank", 2);
    TrivializationWithData cur = baseTrivialization(c.ev, alpha);
    while (cur.rank < targetRank) cur = extendTrivialization(c.ev, cur, alpha, c.s.seed + cur.rank);
    SimpleStructureReport rep = checkSimpleStructure(cur.F, cur.data, c.curve);
    c.results["rank"] = cur.rank;
    c.results["data_size"] = cur.data.count();
    c.results["simple_structure_ok"] = rep.ok;
    c.results["structure_failures"] = rep.failures;
    if (!rep.ok) {
        c.pass = false;
        c.failures.push_back("simple structure verification failed");
    }
    c.check("automorphy_residual",
            verifyAutomorphy(cur.F, FlatFactor::jordan(alpha, cur.rank), c.curve, 20, c.s.seed),
            1e-7);
    out.sampleFn = cur.F;
}

void pipelineSimpleStructure(Ctx& c, PipelineOutcome& out) {
    Complex alpha = parseComplex(c.s.inputs.at("alpha"));
    TrivializationWithData base = baseTrivialization(c.ev, alpha);
    SimpleNullPoleData data = c.s.inputs.contains("simple_data")
                                  ? parseSimpleData(c.curve, c.s.inputs["simple_data"], 1)
                                  : base.data;
    SimpleStructureReport rep = checkSimpleStructure(base.F, data, c.curve);
    c.results["ok"] = rep.ok;
    c.results["failures"] = rep.failures;
    c.results["max_second_order_coeff"] = rep.maxSecondOrderCoeff;
    c.results["max_kernel_residual"] = rep.maxKernelResidual;
    if (!rep.ok) {
        c.pass = false;
        c.failures.push_back("simple structure verification failed");
    }
    out.sampleFn = base.F;
}

void pipelineGamma(Ctx& c) {
    MatrixDivisor D = parseDivisor(c.curve, c.s.inputs.at("divisor"));
    BaseDivisor d0 = parseBaseDivisor(c.curve, c.s.inputs.at("base_divisor"));
    GammaSystem sys = buildGamma(c.ev, D, d0);
    c.results["gamma"] = matrixToJson(sys.gamma());
    c.results["residue_at_base"] = matrixToJson(sys.residueAtBase());
    double worst = 0.0;
    for (size_t i = 0; i < sys.rowEntries().size(); ++i)
        for (size_t j = 0; j < sys.colEntries().size(); ++j) {
            Mat a = sys.gamma().block(
                sys.rowOffset(int(i)), sys.colOffset(int(j)),
                sys.rowOffset(int(i) + 1) - sys.rowOffset(int(i)),
                sys.colOffset(int(j) + 1) - sys.colOffset(int(j)));
            Mat b = sys.blockByContour(int(i), int(j), 0.7, 512);
            worst = std::max(worst, (a - b).norm() / std::max(1.0, a.norm()));
        }
    c.check("block_vs_contour_residual", worst, 1e-7);
    SectionCount sc = sectionCount(sys);
    c.results["section_count"] = sc.count;
    c.results["section_count_certain"] = sc.certain;
}

void pipelineSolveFirst(Ctx& c, PipelineOutcome& out) {
    MatrixDivisor D = parseDivisor(c.curve, c.s.inputs.at("divisor"));
    BaseDivisor d0 = parseBaseDivisor(c.curve, c.s.inputs.at("base_divisor"));
    Mat U0 = c.s.inputs.contains("U0") ? parseMatrix(c.s.inputs["U0"], D.rank(), D.rank())
                                       : Mat(Mat::Identity(D.rank(), D.rank()));
    FirstSolveResult res = solveFirst(c.ev, D, d0, U0);
    const char* verdicts[] = {"solved", "singular_gamma", "side_constraint_violated",
                              "indeterminate"};
    c.results["verdict"] = verdicts[int(res.status)];
    c.results["condition_number"] = res.conditionNumber;
    c.results["side_constraint_abs"] = res.sideAbs;
    c.results["side_constraint_rel"] = res.sideRel;
    if (res.status == FirstSolveResult::Status::Solved) {
        c.check("periodicity_residual", res.periodicityResidual, 1e-6);
        c.check("interpolation_residual", res.interpolationResidual, 1e-5);
        c.check("base_pole_residual", res.basePoleResidual, 1e-6);
        c.results["certified"] = res.certified;
        out.sampleFn = res.K;
    } else if (res.status == FirstSolveResult::Status::Indeterminate) {
        out.exitCode = 3;
        c.results["note"] = res.note;
    }
}

void pipelineSolveSecond(Ctx& c) {
    MatrixDivisor D = parseDivisor(c.curve, c.s.inputs.at("divisor"));
    int trials = c.s.inputs.value("trials", 32);
    SecondSolveResult res = solveSecondExistence(c.ev, D, trials, c.s.seed);
    c.results["found"] = res.found;
    c.results["trials_used"] = res.trialsUsed;
    if (res.found) {
        c.results["condition_number"] = res.conditionNumber;
        LatticeCoords c0 = c.curve.latticeCoords(res.d0->p0.rep());
        LatticeCoords c1 = c.curve.latticeCoords(res.d0->p1.rep());
        c.results["base_divisor"] = {{"p0", {c0.s, c0.t}}, {"p1", {c1.s, c1.t}}};
    } else {
        c.results["note"] = "no certificate found; at genus 1 this is evidence (not proof) of "
                            "non-existence";
    }
}

void pipelineGenus0(Ctx& c) {
    std::vector<Complex> lambdas, mus;
    if (c.s.inputs.contains("lambdas")) {
        for (const json& v : c.s.inputs["lambdas"]) lambdas.push_back(parseComplex(v));
        for (const json& v : c.s.inputs.at("mus")) mus.push_back(parseComplex(v));
    } else {
        int count = c.s.inputs.value("count", 3);
        std::mt19937_64 rng(c.s.seed);
        std::uniform_real_distribution<double> uni(-2.0, 2.0);
        auto fresh = [&](std::vector<Complex>& dst) {
            while (int(dst.size()) < count) {
                Complex z(uni(rng), uni(rng));
                bool ok = true;
                for (Complex q : lambdas)
                    if (std::abs(z - q) < 0.3) ok = false;
                for (Complex q : mus)
                    if (std::abs(z - q) < 0.3) ok = false;
                if (ok) dst.push_back(z);
            }
        };
        fresh(lambdas);
        fresh(mus);
    }
    Genus0Result res = genus0CauchySolve(lambdas, mus);
    c.check("max_deviation", res.maxDeviation, 1e-9);
}

void pipelineAbelFay(Ctx& c) {
    std::vector<Complex> lambdas, mus;
    FlatLineBundle bundle(0.13, 0.41);
    if (c.s.inputs.contains("bundle"))
        bundle = FlatLineBundle(c.s.inputs["bundle"].value("a", 0.13),
                                c.s.inputs["bundle"].value("b", 0.41));
    if (c.s.inputs.contains("lambdas")) {
        for (const json& v : c.s.inputs["lambdas"])
            lambdas.push_back(parsePoint(c.curve, v).rep());
        for (const json& v : c.s.inputs.at("mus")) mus.push_back(parsePoint(c.curve, v).rep());
    } else {
        int count = c.s.inputs.value("count", 2);
        bool forceAbel = c.s.inputs.value("abel", true);
        std::mt19937_64 rng(c.s.seed);
        std::uniform_real_distribution<double> uni(0.1, 0.9);
        auto clearOf = [&](Complex z, const std::vector<Complex>& pts) {
            for (Complex q : pts)
                if (c.curve.latticeDistance(z, q) < 0.12) return false;
            return true;
        };
        while (int(mus.size()) < count) {
            Complex z = c.curve.fromLatticeCoords(uni(rng), uni(rng));
            if (clearOf(z, mus)) mus.push_back(z);
        }
        while (int(lambdas.size()) < count - (forceAbel ? 1 : 0)) {
            Complex z = c.curve.fromLatticeCoords(uni(rng), uni(rng));
            if (clearOf(z, mus) && clearOf(z, lambdas)) lambdas.push_back(z);
        }
        if (forceAbel) {
            Complex last = 0.0;
            for (Complex m : mus) last += m;
            for (Complex l : lambdas) last -= l;
            if (!clearOf(last, mus) || !clearOf(last, lambdas))
                throw ScenarioError("abel-fay: could not complete an Abel-balanced point set; "
                                    "try another seed");
            lambdas.push_back(last);
        }
    }
    FayReport rep = scalarAbelFaySuite(c.ev, lambdas, mus, bundle);
    c.results["n"] = rep.n;
    c.results["abel_holds"] = rep.abelHolds;
    c.results["det_gamma"] = rep.detGamma;
    c.results["fay_criterion"] = rep.fayCriterion;
    c.results["notes"] = rep.notes;
    c.check("fay_rel_error", rep.fayRelError, 1e-8);
    c.check("gamma_inverse_entry_error", rep.gammaInverseEntryError, 1e-7);
    c.check("residue_match_error", rep.residueMatchError, 1e-6);
    if (rep.abelHolds) c.check("interp_identity_residual", rep.interpIdentityResidual, 1e-6);
}

void pipelineKernelsCheck(Ctx& c) {
    BaseDivisor d0 = c.s.inputs.contains("base_divisor")
                         ? parseBaseDivisor(c.curve, c.s.inputs["base_divisor"])
                         : BaseDivisor(c.curve,
                                       TorusPoint(c.curve, c.curve.fromLatticeCoords(0.15, 0.85)),
                                       TorusPoint(c.curve, c.curve.fromLatticeCoords(0.6, 0.1)));
    CanonicalFunctions fam(c.ev, d0);
    std::mt19937_64 rng(c.s.seed);
    std::uniform_real_distribution<double> uni(0.07, 0.93);
    Complex w = c.s.inputs.contains("w") ? parsePoint(c.curve, c.s.inputs["w"]).rep()
                                         : c.curve.fromLatticeCoords(0.31, 0.44);
    std::vector<Complex> singular{w, d0.p0.rep(), d0.p1.rep(),
                                  TorusPoint(c.curve, w + d0.p1.rep() - d0.p0.rep()).rep()};
    double pair = 0.0, elliptic = 0.0;
    const Complex tau = c.curve.tau();
    int used = 0;
    for (int t = 0; t < 200 && used < 20; ++t) {
        Complex p = c.curve.fromLatticeCoords(uni(rng), uni(rng));
        bool clear = true;
        for (Complex q : singular)
            if (c.curve.latticeDistance(p, q) < 0.07) clear = false;
        if (!clear) continue;
        ++used;
        Complex a = fam.fw(w, p), b = fam.fwDirect(w, p), k = fam.fwViaKernels(w, p);
        double scale = std::max(1.0, std::abs(a));
        pair = std::max({pair, std::abs(a - b) / scale, std::abs(a - k) / scale});
        elliptic = std::max({elliptic, std::abs(fam.fw(w, p + 1.0) - a) / scale,
                             std::abs(fam.fw(w, p + tau) - a) / scale});
    }
    c.check("oracle_pair_residual", pair, 1e-8);
    c.check("ellipticity_residual", elliptic, 1e-8);
    double rad = clearRadius(c.curve, w, {d0.p0.rep(), d0.p1.rep()}, 0.08);
    Complex resW = laurentCoefficient(ScalarFn([&](Complex p) { return fam.fw(w, p); }),
                                      ContourSpec{w, rad, 256}, -1);
    c.check("residue_at_w_error", std::abs(resW - 1.0), 1e-8);
    Complex resBase = residueInBasePoint(c.ev, d0.p1.rep(), w,
                                         c.curve.fromLatticeCoords(0.81, 0.27), 0.04);
    c.check("base_point_residue_error", std::abs(resBase + 1.0), 1e-7);
    ContinuityReport cont = continuitySpotCheck(c.ev, d0, 1e-3);
    c.results["continuity_slope_ratio"] = cont.slopeRatio;
    if (!(cont.slopeRatio > 7.0 && cont.slopeRatio < 13.0)) {
        c.pass = false;
        c.failures.push_back("continuity slope ratio outside 10 +- 30%");
    }
}

}  // namespace

PipelineOutcome runPipeline(const Scenario& s) {
    PipelineOutcome out;
    Ctx c(s);
    out.curve = c.curve;
    if (s.pipeline == "theta-check")
        pipelineThetaCheck(c);
    else if (s.pipeline == "trivialize")
        pipelineTrivialize(c, out);
    else if (s.pipeline == "extend")
        pipelineExtend(c, out);
    else if (s.pipeline == "simple-structure")
        pipelineSimpleStructure(c, out);
    else if (s.pipeline == "gamma")
        pipelineGamma(c);
    else if (s.pipeline == "solve-first")
        pipelineSolveFirst(c, out);
    else if (s.pipeline == "solve-second")
        pipelineSolveSecond(c);
    else if (s.pipeline == "genus0")
        pipelineGenus0(c);
    else if (s.pipeline == "abel-fay")
        pipelineAbelFay(c);
    else if (s.pipeline == "kernels-check")
        pipelineKernelsCheck(c);
    else
        throw ScenarioError("unknown pipeline: " + s.pipeline);

    out.report["pipeline"] = s.pipeline;
    out.report["seed"] = s.seed;
    out.report["tau"] = complexToJson(s.tau);
    out.report["inputs"] = s.inputs;
    out.report["results"] = c.results;
    out.report["pass"] = c.pass;
    out.report["failures"] = c.failures;
    if (!c.pass && out.exitCode == 0) out.exitCode = 3;
    return out;
}

std::string emitSamplesCsv(const Scenario& s, const PipelineOutcome& outcome,
                           nlohmann::json& sampleStats) {
    if (!outcome.sampleFn || !outcome.curve)
        throw ScenarioError("this pipeline does not construct a sampleable function");
    const MeromorphicMatrixMap& F = *outcome.sampleFn;
    const EllipticCurve& curve = *outcome.curve;
    int ns = 50, nt = 50;
    double margin = 0.05;
    if (s.samples.contains("grid")) {
        ns = s.samples["grid"].value("n_s", 50);
        nt = s.samples["grid"].value("n_t", 50);
        margin = s.samples["grid"].value("margin", 0.05);
    }
    std::ostringstream csv;
    csv.precision(17);
    csv << "re_u,im_u";
    for (int i = 0; i < F.rows(); ++i)
        for (int j = 0; j < F.cols(); ++j) csv << ",re_f" << i << j << ",im_f" << i << j;
    csv << "\n";
    int rows = 0, omitted = 0;
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < nt; ++b) {
            Complex u = curve.fromLatticeCoords((a + 0.5) / ns, (b + 0.5) / nt);
            bool nearPole = false;
            for (const auto& p : F.declaredPoles())
                if (curve.latticeDistance(u, p.at.rep()) < margin) nearPole = true;
            if (nearPole) {
                ++omitted;
                continue;
            }
            Mat v = F(u);
            csv << u.real() << "," << u.imag();
            for (int i = 0; i < v.rows(); ++i)
                for (int j = 0; j < v.cols(); ++j)
                    csv << "," << v(i, j).real() << "," << v(i, j).imag();
            csv << "\n";
            ++rows;
        }
    sampleStats["rows"] = rows;
    sampleStats["omitted"] = omitted;
    return csv.str();
}

}  // namespace mtriv
