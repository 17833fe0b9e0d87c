#include "carleman/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace carleman {

namespace {

using nlohmann::json;

struct Collector {
  std::vector<std::string>& errors;
  void fail(const std::string& path, const std::string& msg) {
    errors.push_back(path + ": " + msg);
  }
};

Point parse_point(const json& j) {
  Point p = Point::Zero();
  for (size_t a = 0; a < j.size() && a < 3; ++a) p[a] = j[a].get<double>();
  return p;
}

BarrierSpec parse_barrier(const json& j, int n, double alpha, Collector& col,
                          const std::string& path) {
  BarrierSpec b;
  b.n = j.value("n", n);
  b.alpha = j.value("alpha", alpha);
  try {
    b.kind = barrier_case_from_string(j.at("case").get<std::string>());
  } catch (const std::exception& e) {
    col.fail(path + ".case", e.what());
    return b;
  }
  b.R = j.value("R", 1.0);
  b.T = j.value("T", 1.0);
  b.c = j.value("c", 0.0);
  b.c_hat = j.value("c_hat", 0.0);
  b.c_bar = j.value("c_bar", 0.0);
  try {
    b = b.resolved();
  } catch (const std::exception& e) {
    col.fail(path, e.what());
  }
  return b;
}

Primitive parse_primitive(const json& j, int n, double alpha, Collector& col,
                          const std::string& path) {
  const std::string kind = j.value("kind", "");
  try {
    if (kind == "constant") return constant_primitive(j.at("value").get<double>());
    if (kind == "power_tail")
      return power_tail(j.at("A").get<double>(), j.at("exponent").get<double>(),
                        j.value("core", 1.0));
    if (kind == "gaussian_bump")
      return gaussian_bump(j.at("amplitude").get<double>(),
                           j.at("width").get<double>(),
                           j.contains("center") ? parse_point(j["center"])
                                                : Point::Zero());
    if (kind == "barrier_trace") {
      std::vector<std::string> sub_errors;
      Collector sub{sub_errors};
      BarrierSpec b = parse_barrier(j.at("barrier"), n, alpha, sub, path);
      for (const std::string& e : sub_errors) col.errors.push_back(e);
      return barrier_trace(b, j.value("scale", 1.0));
    }
    col.fail(path + ".kind", "unknown primitive kind '" + kind + "'");
  } catch (const std::exception& e) {
    col.fail(path, e.what());
  }
  return constant_primitive(0.0);
}

ComponentRecipe parse_recipe(const json& j, int n, double alpha, Collector& col,
                             const std::string& path) {
  ComponentRecipe r;
  for (size_t i = 0; i < j.size(); ++i)
    r.parts.push_back(
        parse_primitive(j[i], n, alpha, col, path + "[" + std::to_string(i) + "]"));
  return r;
}

}  // namespace

ValidationResult validate_config_text(const std::string& json_text) {
  ValidationResult res;
  Collector col{res.errors};
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    col.fail("$", std::string("not valid JSON: ") + e.what());
    return res;
  }

  ExperimentConfig cfg;

  if (!j.contains("schema_version")) {
    col.fail("schema_version", "mandatory field missing");
  } else if (j["schema_version"].get<int>() != 1) {
    col.fail("schema_version", "unsupported version");
  }

  // model
  if (!j.contains("model")) {
    col.fail("model", "mandatory block missing");
    return res;
  }
  const json& jm = j["model"];
  cfg.model.n = jm.value("n", 0);
  cfg.model.alpha = jm.value("alpha", 0.0);
  cfg.model.epsilon = 1.0;
  try {
    cfg.model.validate();
  } catch (const std::exception& e) {
    col.fail("model", e.what());
  }
  cfg.rate.kind = RateKind::power_sum;
  cfg.rate.alpha = cfg.model.alpha;
  if (jm.contains("rate")) {
    try {
      if (jm["rate"].is_string())
        cfg.rate.kind = rate_kind_from_string(jm["rate"].get<std::string>());
      else {
        cfg.rate.kind = rate_kind_from_string(jm["rate"].value("kind", "power_sum"));
        cfg.rate.alpha = jm["rate"].value("alpha", cfg.model.alpha);
      }
    } catch (const std::exception& e) {
      col.fail("model.rate", e.what());
    }
  }

  // grid
  if (!j.contains("grid")) {
    col.fail("grid", "mandatory block missing");
    return res;
  }
  const json& jg = j["grid"];
  {
    std::vector<Index> cells;
    for (const auto& c : jg.value("cells", json::array()))
      cells.push_back(c.get<Index>());
    double dx = 0.0;
    if (jg.contains("dx") && jg["dx"].is_array()) {
      std::vector<double> dxs;
      for (const auto& d : jg["dx"]) dxs.push_back(d.get<double>());
      for (double d : dxs)
        if (d != dxs.front()) {
          col.fail("grid.dx", "nonuniform spacing is not supported "
                              "(streaming exactness requires identical dx)");
          break;
        }
      if (!dxs.empty()) dx = dxs.front();
    } else {
      dx = jg.value("dx", 0.0);
    }
    std::vector<double> origin;
    for (const auto& o : jg.value("origin", json::array()))
      origin.push_back(o.get<double>());
    Boundary bnd = Boundary::periodic;
    const std::string bs = jg.value("boundary", "periodic");
    if (bs == "periodic")
      bnd = Boundary::periodic;
    else if (bs == "frozen_far_field")
      bnd = Boundary::frozen_far_field;
    else
      col.fail("grid.boundary", "unknown boundary '" + bs + "'");
    try {
      cfg.grid = make_grid(cfg.model.n, cells, dx, bnd, origin);
    } catch (const std::exception& e) {
      col.fail("grid", e.what());
    }
  }

  // epsilons
  for (const auto& e : j.value("epsilons", json::array()))
    cfg.epsilons.push_back(e.get<double>());
  if (cfg.epsilons.empty()) col.fail("epsilons", "need at least one value");
  for (size_t i = 0; i < cfg.epsilons.size(); ++i) {
    if (!(cfg.epsilons[i] > 0.0)) col.fail("epsilons", "values must be positive");
    if (i > 0 && !(cfg.epsilons[i] < cfg.epsilons[i - 1])) {
      col.fail("epsilons", "list must be strictly decreasing");
      break;
    }
  }

  // initial data
  if (!j.contains("initial_data")) {
    col.fail("initial_data", "mandatory block missing");
    return res;
  }
  {
    const json& ji = j["initial_data"];
    const int n2 = 2 * std::max(cfg.model.n, 1);
    if (ji.contains("recipe")) {
      ComponentRecipe r = parse_recipe(ji["recipe"], cfg.model.n, cfg.model.alpha,
                                       col, "initial_data.recipe");
      cfg.initial.g.assign(n2, r);
    } else if (ji.contains("components")) {
      const json& jc = ji["components"];
      if (static_cast<int>(jc.size()) != n2)
        col.fail("initial_data.components", "need 2n recipes");
      for (size_t i = 0; i < jc.size(); ++i)
        cfg.initial.g.push_back(parse_recipe(
            jc[i], cfg.model.n, cfg.model.alpha, col,
            "initial_data.components[" + std::to_string(i) + "]"));
    } else {
      col.fail("initial_data", "need 'recipe' or 'components'");
    }
    if (ji.contains("envelope")) {
      ComponentRecipe r = parse_recipe(ji["envelope"], cfg.model.n,
                                       cfg.model.alpha, col,
                                       "initial_data.envelope");
      cfg.initial.f.assign(n2, r);
    }
    cfg.initial.l1_budget = ji.value("l1_budget", 0.0);
  }

  // barriers
  if (j.contains("barriers")) {
    const json& jb = j["barriers"];
    if (jb.contains("lower"))
      cfg.lower_barrier = parse_barrier(jb["lower"], cfg.model.n, cfg.model.alpha,
                                        col, "barriers.lower");
    if (jb.contains("upper"))
      cfg.upper_barrier = parse_barrier(jb["upper"], cfg.model.n, cfg.model.alpha,
                                        col, "barriers.upper");
  }

  // horizons and t_end
  cfg.horizon_fraction = j.value("horizon_fraction", 0.25);
  Horizons hz;
  bool have_horizons = false;
  if (!cfg.initial.g.empty() && res.errors.empty()) {
    try {
      hz = horizon_estimate(cfg.initial, cfg.model);
      have_horizons = true;
    } catch (const std::exception& e) {
      col.fail("initial_data", e.what());
    }
  }
  if (j.contains("t_end")) {
    cfg.t_end = j["t_end"].get<double>();
    if (!(cfg.t_end > 0.0)) col.fail("t_end", "must be positive");
    if (have_horizons && std::isfinite(hz.min()) &&
        cfg.t_end > cfg.horizon_fraction * hz.min() + 1e-12) {
      std::ostringstream os;
      os << "t_end exceeds horizon_fraction * min(T1, T2) = "
         << cfg.horizon_fraction * hz.min();
      col.fail("t_end", os.str());
    }
  } else if (have_horizons && std::isfinite(hz.min())) {
    cfg.t_end = cfg.horizon_fraction * hz.min();
  } else {
    col.fail("t_end", "required when the horizon estimate is infinite");
  }

  // snapshots: explicit list or uniform count
  if (j.contains("snapshots")) {
    const json& js = j["snapshots"];
    if (js.is_array())
      for (const auto& s : js) cfg.snapshot_times.push_back(s.get<double>());
    else if (js.is_object() && js.contains("count")) {
      const int count = js["count"].get<int>();
      for (int s = 1; s <= count; ++s)
        cfg.snapshot_times.push_back(cfg.t_end * s / count);
    }
  }
  if (cfg.snapshot_times.empty() && cfg.t_end > 0.0)
    cfg.snapshot_times = {0.5 * cfg.t_end, cfg.t_end};

  // schedule must land on whole steps of dt = eps dx for every eps
  if (cfg.grid.dx > 0.0)
    for (double eps : cfg.epsilons) {
      const double dt = eps * cfg.grid.dx;
      for (double s : cfg.snapshot_times) {
        const double k = s / dt;
        if (std::abs(k - std::llround(k)) > 1e-6) {
          std::ostringstream os;
          os << "time " << s << " is not a whole number of steps dt = eps*dx for eps = "
             << eps;
          col.fail("snapshots", os.str());
        }
      }
    }

  // domain-of-dependence warning for frozen boundaries
  if (cfg.grid.boundary == Boundary::frozen_far_field && cfg.grid.dx > 0.0 &&
      !cfg.epsilons.empty()) {
    const Region k_region = centered_box(cfg.grid, 0.5);
    double dist = std::numeric_limits<double>::infinity();
    for (int a = 0; a < cfg.grid.n; ++a) {
      dist = std::min(dist, k_region.center[a] - k_region.radius - cfg.grid.origin[a]);
      dist = std::min(dist, cfg.grid.origin[a] + cfg.grid.extent(a) -
                                (k_region.center[a] + k_region.radius));
    }
    const double reach = cfg.t_end / cfg.epsilons.back();
    if (dist < reach) {
      std::ostringstream os;
      os << "far-field values reach the central region: boundary distance " << dist
         << " < t_end/eps = " << reach;
      res.warnings.push_back("grid: " + os.str());
    }
  }

  cfg.output_dir = j.value("output_dir", std::string("out"));
  cfg.seed = j.value("seed", 0ull);
  cfg.threads = j.value("threads", 1);
  if (j.contains("diagnostics")) {
    const json& jd = j["diagnostics"];
    cfg.diagnostics.convergence = jd.value("convergence", true);
    cfg.diagnostics.flux_l2 = jd.value("flux_l2", false);
    cfg.diagnostics.ficks = jd.value("ficks", false);
    cfg.diagnostics.contraction = jd.value("contraction", false);
    cfg.diagnostics.entropy = jd.value("entropy", false);
  }

  if (res.errors.empty()) res.config = cfg;
  return res;
}

ValidationResult validate_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) {
    ValidationResult res;
    res.errors.push_back("$: cannot read " + path);
    return res;
  }
  std::stringstream ss;
  ss << is.rdbuf();
  return validate_config_text(ss.str());
}

}  // namespace carleman
