// Scenario-driven front end: JSON scenario files name a pipeline and its
// inputs (curve, factor, divisor, base divisor, point lists, numeric knobs);
// running a pipeline produces a deterministic JSON report and, optionally, a
// CSV of sampled function values.
//
// Wire conventions: complex numbers are [re, im]; torus points are lattice
// coordinate pairs (s, t) meaning s + t*tau; matrices are row-major nested
// arrays of complex entries.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "mtriv/divisors.hpp"
#include "mtriv/interpolate.hpp"
#include "mtriv/maps.hpp"
#include "mtriv/theta.hpp"

namespace mtriv {

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    Complex tau{0.0, 1.0};
    std::string pipeline;
    std::uint64_t seed = 1;
    double tailTol = 1e-12;
    double tol = 1e-7;
    bool tolExplicit = false;  // when set, tol replaces every per-check bound
    int contourNodes = 128;
    nlohmann::json inputs;   // pipeline-specific
    nlohmann::json samples;  // optional grid spec
    nlohmann::json raw;      // full document, echoed into reports
};

// Parses and validates a scenario document; merges defaults from the JSON file
// named by the MTRIV_CONFIG environment variable, when set.
Scenario loadScenario(const nlohmann::json& doc);
Scenario loadScenarioFile(const std::string& path);

struct PipelineOutcome {
    nlohmann::json report;
    int exitCode = 0;  // 0 ok, 2 input error, 3 numerical indeterminacy
    // Primary constructed function of the pipeline, for CSV sampling.
    std::optional<MeromorphicMatrixMap> sampleFn;
    std::optional<EllipticCurve> curve;
};

PipelineOutcome runPipeline(const Scenario& s);

// Samples the outcome's function on an (s, t) grid, omitting rows within the
// pole margin; returns the CSV text and fills counts into the report object.
std::string emitSamplesCsv(const Scenario& s, const PipelineOutcome& outcome,
                           nlohmann::json& sampleStats);

// JSON <-> domain-object helpers (shared with tests).
Complex parseComplex(const nlohmann::json& j);
nlohmann::json complexToJson(Complex z);
Mat parseMatrix(const nlohmann::json& j, int rows, int cols);
nlohmann::json matrixToJson(const Mat& m);
MatrixDivisor parseDivisor(const EllipticCurve& curve, const nlohmann::json& j);
SimpleNullPoleData parseSimpleData(const EllipticCurve& curve, const nlohmann::json& j, int r);
BaseDivisor parseBaseDivisor(const EllipticCurve& curve, const nlohmann::json& j);

}  // namespace mtriv
