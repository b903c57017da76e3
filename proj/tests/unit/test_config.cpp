#include <gtest/gtest.h>

#include <string>

#include "json.hpp"
#include "sixbie/config.hpp"
#include "sixbie/error.hpp"
#include "sixbie/schema.hpp"

using namespace sixbie;
using nlohmann::json;
using namespace sixbie::schema;

namespace {

const std::string kMinimal = R"({"coefficients": {"a0": [0, 2], "a1": [2, -3], "a2": [-3, 1]}, "lambda": [16, 0]})";

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

}  // namespace

TEST(Schema, ValidatorSubset) {
  const json schema = json::parse(R"({
    "type": "object", "required": ["n"], "additionalProperties": false,
    "$defs": {"pair": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}},
    "properties": {
      "n": {"type": "integer", "minimum": 8},
      "x": {"type": "number", "exclusiveMinimum": 0},
      "kind": {"type": "string", "enum": ["a", "b"]},
      "p": {"$ref": "#/$defs/pair"}
    }})");
  EXPECT_TRUE(validate(json::parse(R"({"n": 8, "x": 0.5, "kind": "a", "p": [1, 2]})"), schema).empty());
  EXPECT_EQ(validate(json::parse(R"({})"), schema).size(), 1u);
  EXPECT_FALSE(validate(json::parse(R"({"n": 7})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 8.5})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 8, "x": 0})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 8, "kind": "c"})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 8, "p": [1]})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 8, "p": [1, "a"]})"), schema).empty());
  EXPECT_FALSE(validate(json::parse(R"({"n": 8, "extra": 1})"), schema).empty());
  const auto errs = validate(json::parse(R"({"n": 7, "kind": "c"})"), schema);
  EXPECT_EQ(errs.size(), 2u);
}

TEST(Schema, DefaultsFillNestedObjects) {
  json doc = json::parse(kMinimal);
  apply_defaults(doc, config_schema());
  EXPECT_EQ(doc["n_nodes"], 256);
  EXPECT_EQ(doc["method"], "direct");
  EXPECT_EQ(doc["tolerances"]["max_iter"], 200);
  EXPECT_EQ(doc["curve"]["kind"], "ellipse");
  EXPECT_TRUE(validate(doc, config_schema()).empty());
}

TEST(Config, MinimalDocumentTakesDefaults) {
  const ProblemConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.n_nodes, 256);
  EXPECT_EQ(c.method, SolveMethod::direct);
  EXPECT_DOUBLE_EQ(c.tol, 1e-10);
  EXPECT_EQ(c.curve_kind, CurveKind::ellipse);
  ASSERT_TRUE(c.lambda.has_value());
  EXPECT_EQ(*c.lambda, cplx(16, 0));
  EXPECT_EQ(c.coefficients.a0, cplx(0, 2));
  EXPECT_EQ(c.data.family, "trig");
  EXPECT_FALSE(c.grid.points.empty());
}

TEST(Config, GridFromBoxAndShape) {
  const ProblemConfig c = parse_config(R"({"coefficients": {"a0": [0, 2], "a1": [2, -3], "a2": [-3, 1]},
    "lambda": [16, 0], "evaluation_grid": {"box": [-1, 1, 0, 2], "shape": [3, 2]}})");
  ASSERT_EQ(c.grid.points.size(), 6u);
  EXPECT_DOUBLE_EQ(c.grid.points.front().x, -1.0);
  EXPECT_DOUBLE_EQ(c.grid.points.back().x, 1.0);
  EXPECT_DOUBLE_EQ(c.grid.points.back().y, 2.0);
}

TEST(Config, EveryProblemIsReported) {
  const std::string msg = config_error(R"({"coefficients": {"a0": [0, 2], "a1": [2, -3], "a2": [-3, 1]},
    "lambda": [16, 0], "n_nodes": 4, "method": "gmres"})");
  EXPECT_NE(msg.find("n_nodes"), std::string::npos);
  EXPECT_NE(msg.find("method"), std::string::npos);
}

TEST(Config, CrossFieldChecks) {
  config_error(R"({"coefficients": {"a0": [0, 2], "a1": [2, -3], "a2": [-3, 1]}, "lambda": [16, 0], "n_nodes": 65})");
  config_error(R"({"coefficients": {"a0": [0, 2], "a1": [2, -3], "a2": [-3, 1]}})");
  config_error(R"({"coefficients": {"a0": [0, 2], "a1": [2, -3], "a2": [-3, 1]}, "lambda": [16, 0],
    "quadrature": {"window": [12, 1]}})");
  config_error("{not json");
  config_error(R"({"lambda": [16, 0]})");
}

TEST(Config, TrigDataScaleWithLambda) {
  DataSpec spec = default_trig_spec();
  spec.lambda_ref = 4.0;
  const BoundaryData d = make_boundary_data(spec);
  const cplx at8 = d.phi0(0.3, 8.0), at40 = d.phi0(0.3, 40.0);
  EXPECT_NEAR(std::abs(at8 / at40), (4.0 / 12.0) / (4.0 / 44.0), 1e-12);
  spec.lambda_dependent = false;
  const BoundaryData flat = make_boundary_data(spec);
  EXPECT_EQ(flat.phi1(0.3, 8.0), flat.phi1(0.3, 40.0));
  DataSpec zero_spec;
  zero_spec.family = "zero";
  const BoundaryData zero = make_boundary_data(zero_spec);
  EXPECT_EQ(zero.phi2(1.0, 16.0), cplx(0.0));
}
