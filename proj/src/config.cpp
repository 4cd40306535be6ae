#include "fracflow/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "fracflow/kernels.hpp"

namespace fracflow {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!j.is_object())
    throw ConfigError(context + ": expected an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError(context + ": unknown key \"" + item.key() + "\"");
  }
}

double get_num(const json& j, const std::string& key,
               const std::string& context) {
  if (!j.contains(key))
    throw ConfigError(context + ": missing key \"" + key + "\"");
  if (!j[key].is_number())
    throw ConfigError(context + ": key \"" + key + "\" must be a number");
  return j[key].get<double>();
}

double get_num_or(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? j[key].get<double>() : fallback;
}

struct ParsedFn {
  std::function<double(double)> fn;
  std::vector<double> breakpoints;
};

ParsedFn parse_fn(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError(context + ": function expression needs a \"type\"");
  const std::string type = j["type"].get<std::string>();
  ParsedFn out;
  if (type == "const") {
    check_keys(j, {"type", "value"}, context);
    const double c = get_num(j, "value", context);
    out.fn = [c](double) { return c; };
  } else if (type == "poly") {
    check_keys(j, {"type", "coeffs"}, context);
    if (!j.contains("coeffs") || !j["coeffs"].is_array())
      throw ConfigError(context + ": \"coeffs\" must be an array");
    auto coeffs = j["coeffs"].get<std::vector<double>>();
    if (coeffs.empty())
      throw ConfigError(context + ": \"coeffs\" must be nonempty");
    out.fn = [coeffs](double t) {
      double v = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
      return v;
    };
  } else if (type == "sin") {
    check_keys(j, {"type", "a"}, context);
    const double a = get_num(j, "a", context);
    out.fn = [a](double t) { return std::sin(a * t); };
  } else if (type == "exp") {
    check_keys(j, {"type", "a"}, context);
    const double a = get_num(j, "a", context);
    out.fn = [a](double t) { return std::exp(a * t); };
  } else if (type == "piecewise") {
    check_keys(j, {"type", "breakpoints", "values"}, context);
    if (!j.contains("breakpoints") || !j.contains("values"))
      throw ConfigError(context +
                        ": piecewise needs \"breakpoints\" and \"values\"");
    auto bps = j["breakpoints"].get<std::vector<double>>();
    auto vals = j["values"].get<std::vector<double>>();
    if (vals.size() != bps.size() + 1)
      throw ConfigError(context +
                        ": piecewise needs values.size == breakpoints.size+1");
    if (!std::is_sorted(bps.begin(), bps.end()))
      throw ConfigError(context + ": piecewise breakpoints must be sorted");
    out.breakpoints = bps;
    out.fn = [bps, vals](double t) {
      std::size_t i = 0;
      while (i < bps.size() && t >= bps[i]) ++i;
      return vals[i];
    };
  } else {
    throw ConfigError(context + ": unknown function type \"" + type + "\"");
  }
  return out;
}

// 2-d source for the mixed problem: const | separable product
struct ParsedFn2 {
  std::function<double(double, double)> fn;
};

ParsedFn2 parse_fn2(const json& j, const std::string& context) {
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError(context + ": function expression needs a \"type\"");
  const std::string type = j["type"].get<std::string>();
  ParsedFn2 out;
  if (type == "const") {
    check_keys(j, {"type", "value"}, context);
    const double c = get_num(j, "value", context);
    out.fn = [c](double, double) { return c; };
  } else if (type == "separable") {
    check_keys(j, {"type", "f1", "f2"}, context);
    if (!j.contains("f1") || !j.contains("f2"))
      throw ConfigError(context + ": separable needs \"f1\" and \"f2\"");
    auto f1 = parse_fn(j["f1"], context + ".f1");
    auto f2 = parse_fn(j["f2"], context + ".f2");
    out.fn = [g1 = f1.fn, g2 = f2.fn](double x, double y) {
      return g1(x) * g2(y);
    };
  } else {
    throw ConfigError(context + ": unknown 2-d function type \"" + type +
                      "\"");
  }
  return out;
}

struct ParsedKernel {
  JumpKernel kernel;
  double stable_beta = 0.0;  // > 0 only for the constant-order family
};

ParsedKernel parse_kernel(const json& j, Interval working,
                          const std::string& context) {
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError(context + ": kernel needs a \"type\"");
  const std::string type = j["type"].get<std::string>();
  ParsedKernel out;
  if (type == "stable") {
    check_keys(j, {"type", "beta"}, context);
    const double beta = get_num(j, "beta", context);
    out.kernel = kernel_stable(beta);
    out.stable_beta = beta;
  } else if (type == "multi_term") {
    check_keys(j, {"type", "weights", "betas"}, context);
    if (!j.contains("weights") || !j.contains("betas"))
      throw ConfigError(context + ": multi_term needs weights and betas");
    std::vector<std::function<double(double)>> ws;
    for (const auto& w : j["weights"])
      ws.push_back(parse_fn(w, context + ".weights").fn);
    auto betas = j["betas"].get<std::vector<double>>();
    out.kernel = kernel_multi_term(std::move(ws), std::move(betas), working);
  } else if (type == "variable_order") {
    check_keys(j, {"type", "beta_fn", "beta_lo", "beta_hi"}, context);
    auto bf = parse_fn(j.at("beta_fn"), context + ".beta_fn");
    out.kernel = kernel_variable_order(bf.fn, get_num(j, "beta_lo", context),
                                       get_num(j, "beta_hi", context),
                                       working);
  } else if (type == "distributed") {
    check_keys(j, {"type", "weight", "order", "nodes"}, context);
    if (!j.contains("nodes") || !j["nodes"].is_array())
      throw ConfigError(context + ": distributed needs a nodes array");
    std::vector<DistributedNode> nodes;
    for (const auto& n : j["nodes"]) {
      check_keys(n, {"s", "m"}, context + ".nodes");
      nodes.push_back({get_num(n, "s", context), get_num(n, "m", context)});
    }
    // weight(s,t) and order(s,t): separable in s and t, or const
    auto parse_st = [&](const char* key) {
      if (!j.contains(key))
        throw ConfigError(context + ": distributed needs \"" +
                          std::string(key) + "\"");
      auto f2 = parse_fn2(j[key], context + "." + key);
      return f2.fn;
    };
    out.kernel = kernel_distributed(parse_st("weight"), parse_st("order"),
                                    std::move(nodes), working);
  } else {
    throw ConfigError(context + ": unknown kernel type \"" + type + "\"");
  }
  return out;
}

std::vector<double> parse_grid_1d(const json& j, const std::string& context) {
  if (j.contains("points")) {
    check_keys(j, {"points"}, context);
    auto pts = j["points"].get<std::vector<double>>();
    if (pts.empty()) throw ConfigError(context + ": empty grid");
    return pts;
  }
  check_keys(j, {"start", "stop", "count"}, context);
  const double start = get_num(j, "start", context);
  const double stop = get_num(j, "stop", context);
  const int count = static_cast<int>(get_num(j, "count", context));
  if (count < 1 || stop < start)
    throw ConfigError(context + ": bad grid range");
  std::vector<double> pts(count);
  for (int i = 0; i < count; ++i)
    pts[i] = count == 1
                 ? stop
                 : start + (stop - start) * i / static_cast<double>(count - 1);
  return pts;
}

McConfig parse_mc(const json& j, const std::string& context) {
  McConfig mc;
  if (j.is_null()) return mc;
  check_keys(j, {"n_paths", "ds", "master_seed", "horizon_override"},
             context);
  mc.n_paths = static_cast<std::size_t>(get_num_or(j, "n_paths", 100000));
  mc.ds = get_num_or(j, "ds", 2e-3);
  mc.master_seed =
      static_cast<std::uint64_t>(get_num_or(j, "master_seed", 20240101));
  mc.horizon_override = get_num_or(j, "horizon_override", -1.0);
  if (mc.n_paths == 0) throw ConfigError(context + ": n_paths must be > 0");
  if (!(mc.ds > 0.0)) throw ConfigError(context + ": ds must be > 0");
  return mc;
}

json parse_text(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) throw ConfigError("config: invalid JSON document");
  return j;
}

void check_schema_version(const json& j) {
  if (!j.contains("schema_version"))
    throw ConfigError("config: missing key \"schema_version\"");
  if (j["schema_version"].get<int>() != 1)
    throw ConfigError("config: unsupported schema_version");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text,
                           OperatorKind expected_kind) {
  json j = parse_text(json_text);
  check_keys(j,
             {"schema_version", "problem", "method", "grid", "mc", "output",
              "report"},
             "config");
  check_schema_version(j);
  if (!j.contains("problem")) throw ConfigError("config: missing \"problem\"");
  if (!j.contains("grid")) throw ConfigError("config: missing \"grid\"");

  RunConfig rc;
  const json& p = j["problem"];

  const std::string method =
      j.contains("method") ? j["method"].get<std::string>() : "mc";
  if (method == "mc")
    rc.method = Method::mc;
  else if (method == "quad")
    rc.method = Method::quad;
  else if (method == "closed_form")
    rc.method = Method::closed_form;
  else
    throw ConfigError("config: unknown method \"" + method + "\"");

  rc.problem.kind = expected_kind;
  if (expected_kind == OperatorKind::mixed) {
    check_keys(p,
               {"operator", "kernels", "lambda", "g", "phi", "intervals"},
               "problem");
    if (p.contains("operator") &&
        p["operator"].get<std::string>() != "mixed")
      throw ConfigError("problem: operator does not match the subcommand");
    if (!p.contains("kernels") || !p["kernels"].is_array() ||
        p["kernels"].size() != 2)
      throw ConfigError("problem: mixed needs a 2-element \"kernels\" array");
    Interval iv1{0.0, 1.0}, iv2{0.0, 1.0};
    if (p.contains("intervals")) {
      const auto& ivs = p["intervals"];
      if (!ivs.is_array() || ivs.size() != 2)
        throw ConfigError("problem: \"intervals\" must have 2 entries");
      check_keys(ivs[0], {"a", "b"}, "problem.intervals");
      check_keys(ivs[1], {"a", "b"}, "problem.intervals");
      iv1 = {get_num_or(ivs[0], "a", 0.0), get_num_or(ivs[0], "b", 1.0)};
      iv2 = {get_num_or(ivs[1], "a", 0.0), get_num_or(ivs[1], "b", 1.0)};
      if (iv1.a != 0.0 || iv2.a != 0.0)
        throw ConfigError("problem: mixed intervals must start at 0");
    }
    auto k1 = parse_kernel(p["kernels"][0], iv1, "problem.kernels[0]");
    auto k2 = parse_kernel(p["kernels"][1], iv2, "problem.kernels[1]");
    rc.problem.kernel = std::move(k1.kernel);
    rc.problem.kernel2 = std::move(k2.kernel);
    rc.beta = k1.stable_beta;
    rc.beta2 = k2.stable_beta;
    rc.problem.b1 = iv1.b;
    rc.problem.b2 = iv2.b;
    if (p.contains("g")) rc.problem.g2 = parse_fn2(p["g"], "problem.g").fn;
    if (p.contains("phi")) {
      auto phi = parse_fn(p["phi"], "problem.phi");
      rc.problem.phi = phi.fn;
      if (std::fabs(rc.problem.phi(0.0)) > 1e-12)
        throw ConfigError("problem.phi: must vanish at 0");
    }
  } else {
    check_keys(p, {"operator", "kernel", "lambda", "g", "u_a", "interval"},
               "problem");
    if (p.contains("operator")) {
      const std::string op = p["operator"].get<std::string>();
      if ((expected_kind == OperatorKind::caputo && op != "caputo") ||
          (expected_kind == OperatorKind::rl && op != "rl"))
        throw ConfigError("problem: operator does not match the subcommand");
    }
    Interval iv{0.0, 1.0};
    if (p.contains("interval")) {
      check_keys(p["interval"], {"a", "b"}, "problem.interval");
      iv = {get_num_or(p["interval"], "a", 0.0),
            get_num_or(p["interval"], "b", 1.0)};
      if (!(iv.b > iv.a)) throw ConfigError("problem.interval: b must be > a");
    }
    rc.problem.a = iv.a;
    rc.problem.b = iv.b;
    if (!p.contains("kernel"))
      throw ConfigError("problem: missing \"kernel\"");
    auto k = parse_kernel(p["kernel"], iv, "problem.kernel");
    rc.problem.kernel = std::move(k.kernel);
    rc.beta = k.stable_beta;
    if (p.contains("g")) {
      auto g = parse_fn(p["g"], "problem.g");
      rc.problem.g = g.fn;
      rc.problem.g_breakpoints = g.breakpoints;
    }
    if (expected_kind == OperatorKind::caputo) {
      rc.problem.u_a = get_num_or(p, "u_a", 0.0);
    } else if (p.contains("u_a")) {
      throw ConfigError(
          "problem: u_a is not accepted for the rl operator (fixed to 0)");
    }
  }
  rc.problem.lambda = get_num_or(p, "lambda", 0.0);
  if (rc.problem.lambda < 0.0 && rc.method != Method::closed_form)
    throw ConfigError("problem.lambda: negative lambda needs closed_form");

  if (rc.method != Method::mc && rc.beta == 0.0)
    throw ConfigError(
        "config: method quad/closed_form requires kernel type \"stable\"");
  if (rc.method == Method::closed_form &&
      expected_kind == OperatorKind::mixed)
    throw ConfigError("config: closed_form is not available for mixed");

  const json& gj = j["grid"];
  if (expected_kind == OperatorKind::mixed) {
    if (gj.contains("points2d")) {
      check_keys(gj, {"points2d"}, "grid");
      for (const auto& q : gj["points2d"]) {
        auto v = q.get<std::vector<double>>();
        if (v.size() != 2)
          throw ConfigError("grid.points2d: entries must be pairs");
        rc.grid.points2d.push_back({v[0], v[1]});
      }
      if (rc.grid.points2d.empty()) throw ConfigError("grid: empty grid");
    } else {
      check_keys(gj, {"grid1", "grid2"}, "grid");
      if (!gj.contains("grid1") || !gj.contains("grid2"))
        throw ConfigError("grid: mixed needs points2d or grid1+grid2");
      auto g1 = parse_grid_1d(gj["grid1"], "grid.grid1");
      auto g2 = parse_grid_1d(gj["grid2"], "grid.grid2");
      for (double x : g1)
        for (double y : g2) rc.grid.points2d.push_back({x, y});
    }
  } else {
    rc.grid.points = parse_grid_1d(gj, "grid");
  }

  rc.mc = parse_mc(j.contains("mc") ? j["mc"] : json(), "mc");
  if (j.contains("output")) rc.output = j["output"].get<std::string>();
  if (j.contains("report")) rc.report = j["report"].get<bool>();
  return rc;
}

MlConfig parse_ml_config(const std::string& json_text) {
  json j = parse_text(json_text);
  check_keys(j, {"schema_version", "ml", "output"}, "config");
  check_schema_version(j);
  if (!j.contains("ml")) throw ConfigError("config: missing \"ml\"");
  const json& m = j["ml"];
  check_keys(m, {"beta", "beta2", "grid"}, "ml");
  MlConfig out;
  out.beta = get_num(m, "beta", "ml");
  out.beta2 = get_num_or(m, "beta2", 0.0);
  if (!m.contains("grid")) throw ConfigError("ml: missing \"grid\"");
  out.grid = parse_grid_1d(m["grid"], "ml.grid");
  if (j.contains("output")) out.output = j["output"].get<std::string>();
  return out;
}

DensityConfig parse_density_config(const std::string& json_text) {
  json j = parse_text(json_text);
  check_keys(j, {"schema_version", "density", "output"}, "config");
  check_schema_version(j);
  if (!j.contains("density")) throw ConfigError("config: missing \"density\"");
  const json& d = j["density"];
  check_keys(d, {"beta", "grid"}, "density");
  DensityConfig out;
  out.beta = get_num(d, "beta", "density");
  if (!d.contains("grid")) throw ConfigError("density: missing \"grid\"");
  out.grid = parse_grid_1d(d["grid"], "density.grid");
  if (j.contains("output")) out.output = j["output"].get<std::string>();
  return out;
}

ExitLawConfig parse_exit_law_config(const std::string& json_text) {
  json j = parse_text(json_text);
  check_keys(j, {"schema_version", "exit_law", "mc", "output"}, "config");
  check_schema_version(j);
  if (!j.contains("exit_law"))
    throw ConfigError("config: missing \"exit_law\"");
  const json& e = j["exit_law"];
  check_keys(e, {"kernel", "lambda", "t", "a", "grid"}, "exit_law");
  ExitLawConfig out;
  if (!e.contains("kernel")) throw ConfigError("exit_law: missing kernel");
  out.lambda = get_num_or(e, "lambda", 1.0);
  out.t = get_num_or(e, "t", 1.0);
  out.a = get_num_or(e, "a", 0.0);
  auto k = parse_kernel(e["kernel"], {out.a, std::max(out.t, out.a + 1.0)},
                        "exit_law.kernel");
  out.kernel = std::move(k.kernel);
  out.kernel_beta = k.stable_beta;
  if (e.contains("grid")) out.grid = parse_grid_1d(e["grid"], "exit_law.grid");
  out.mc = parse_mc(j.contains("mc") ? j["mc"] : json(), "mc");
  if (j.contains("output")) out.output = j["output"].get<std::string>();
  return out;
}

ValidateConfig parse_validate_config(const std::string& json_text) {
  json j = parse_text(json_text);
  check_keys(j, {"schema_version", "validate", "output"}, "config");
  check_schema_version(j);
  ValidateConfig out;
  if (j.contains("validate")) {
    const json& v = j["validate"];
    check_keys(v, {"n_paths", "ds", "master_seed", "quick"}, "validate");
    out.n_paths =
        static_cast<std::size_t>(get_num_or(v, "n_paths", 20000));
    out.ds = get_num_or(v, "ds", 2e-3);
    out.master_seed =
        static_cast<std::uint64_t>(get_num_or(v, "master_seed", 20240811));
    if (v.contains("quick")) out.quick = v["quick"].get<bool>();
  }
  if (j.contains("output")) out.output = j["output"].get<std::string>();
  return out;
}

}  // namespace fracflow
