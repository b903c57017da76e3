#include "sixbie/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "sixbie/error.hpp"
#include "sixbie/schema.hpp"

namespace sixbie {

namespace {

using nlohmann::json;

cplx to_cplx(const json& j) { return {j[0].get<real>(), j[1].get<real>()}; }

std::vector<TrigMode> to_modes(const json& arr) {
  std::vector<TrigMode> out;
  for (const json& m : arr) out.push_back({m["k"].get<int>(), to_cplx(m["cos"]), to_cplx(m["sin"])});
  return out;
}

// Used when the trig family is chosen without explicit modes.
std::array<std::vector<TrigMode>, 3> default_modes() {
  return {std::vector<TrigMode>{{0, {1.0, 0.0}, {}}, {1, {0.5, 0.0}, {}}},
          std::vector<TrigMode>{{2, {}, {0.3, 0.0}}},
          std::vector<TrigMode>{{1, {0.0, 0.2}, {}}}};
}

std::vector<Vec2> grid_points(const json& g) {
  std::vector<Vec2> pts;
  if (g.contains("points")) {
    for (const json& p : g["points"]) pts.push_back({p[0].get<real>(), p[1].get<real>()});
    return pts;
  }
  const json& box = g["box"];
  const int nx = g["shape"][0].get<int>(), ny = g["shape"][1].get<int>();
  const real x0 = box[0].get<real>(), x1 = box[1].get<real>();
  const real y0 = box[2].get<real>(), y1 = box[3].get<real>();
  auto at = [](real lo, real hi, int i, int n) { return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) pts.push_back({at(x0, x1, i, nx), at(y0, y1, j, ny)});
  return pts;
}

}  // namespace

SolveOptions ProblemConfig::solve_options() const {
  SolveOptions o;
  o.nystrom = nystrom;
  o.tol = tol;
  o.max_iter = max_iter;
  o.fallback_direct = fallback_direct;
  return o;
}

ProblemConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, fmt::format("config is not valid JSON: {}", e.what()));
  }
  const json& schema = schema::config_schema();
  std::vector<std::string> problems = schema::validate(doc, schema);
  if (problems.empty()) {
    schema::apply_defaults(doc, schema);
    if (doc["n_nodes"].get<int>() % 2 != 0) problems.push_back("/n_nodes: must be even");
    if (!doc.contains("lambda") && !doc.contains("lambda_sweep"))
      problems.push_back("/: one of 'lambda' or 'lambda_sweep' is required");
    const json& w = doc["quadrature"]["window"];
    if (!(w[0].get<real>() < w[1].get<real>())) problems.push_back("/quadrature/window: u1 must be below u2");
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::ConfigInvalid, msg);
  }

  ProblemConfig c;
  const json& co = doc["coefficients"];
  c.coefficients = {to_cplx(co["a0"]), to_cplx(co["a1"]), to_cplx(co["a2"])};

  const json& cu = doc["curve"];
  c.curve_kind = curve_kind_from_string(cu["kind"].get<std::string>());
  c.curve.center = {cu["center"][0].get<real>(), cu["center"][1].get<real>()};
  c.curve.radius = cu["radius"].get<real>();
  c.curve.a = cu["a"].get<real>();
  c.curve.b = cu["b"].get<real>();
  for (const json& h : cu["harmonics"]) c.curve.harmonics.emplace_back(h[0].get<int>(), h[1].get<real>());

  c.n_nodes = doc["n_nodes"].get<int>();
  if (doc.contains("lambda")) c.lambda = to_cplx(doc["lambda"]);
  if (doc.contains("lambda_sweep"))
    for (const json& l : doc["lambda_sweep"]) c.lambda_sweep.push_back(to_cplx(l));
  c.sector.radius = doc["sector"]["R"].get<real>();
  c.sector.delta = doc["sector"]["delta"].get<real>();

  const json& bd = doc["boundary_data"];
  c.data.family = bd["family"].get<std::string>();
  c.data.lambda_dependent = bd["lambda_dependent"].get<bool>();
  c.data.lambda_ref = bd["lambda_ref"].get<real>();
  const bool explicit_modes = bd.contains("phi0") || bd.contains("phi1") || bd.contains("phi2");
  if (explicit_modes) {
    const char* keys[3] = {"phi0", "phi1", "phi2"};
    for (int s = 0; s < 3; ++s)
      if (bd.contains(keys[s])) c.data.modes[s] = to_modes(bd[keys[s]]);
  } else if (c.data.family == "trig") {
    c.data.modes = default_modes();
  }

  c.method = solve_method_from_string(doc["method"].get<std::string>());
  c.tol = doc["tolerances"]["tol"].get<real>();
  c.max_iter = doc["tolerances"]["max_iter"].get<int>();
  c.fallback_direct = doc["tolerances"]["fallback_direct"].get<bool>();

  const json& q = doc["quadrature"];
  c.nystrom.upsample = q["upsample"].get<int>();
  c.nystrom.resolution = q["resolution"].get<real>();
  c.nystrom.window_u1 = q["window"][0].get<real>();
  c.nystrom.window_u2 = q["window"][1].get<real>();

  c.grid.points = grid_points(doc["evaluation_grid"]);
  c.out_dir = doc["output"]["dir"].get<std::string>();
  c.verify_settings = doc["verify"].dump();
  return c;
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, fmt::format("cannot read config '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

DataSpec default_trig_spec() {
  DataSpec spec;
  spec.modes = default_modes();
  return spec;
}

BoundaryData make_boundary_data(const DataSpec& spec) {
  if (spec.family == "zero") return BoundaryData::zero();
  if (spec.family != "trig")
    throw Error(ErrorCode::InvalidArgument, fmt::format("no closed-form data for family '{}'", spec.family));
  BoundaryData d;
  DataFn* fns[3] = {&d.phi0, &d.phi1, &d.phi2};
  for (int s = 0; s < 3; ++s) {
    *fns[s] = [modes = spec.modes[s], dep = spec.lambda_dependent, ref = spec.lambda_ref](real t, cplx lam) {
      cplx v = 0.0;
      for (const TrigMode& m : modes) v += m.cos_coef * std::cos(m.k * t) + m.sin_coef * std::sin(m.k * t);
      return dep ? v * (ref / (lam + ref)) : v;
    };
  }
  return d;
}

}  // namespace sixbie
