#include "carleman/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "carleman/manifest.hpp"
#include "carleman/snapshot_io.hpp"
#include "json.hpp"

namespace carleman {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  std::string s = buf;
  for (char& c : s)
    if (c == '.') c = 'p';
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << text;
}

FarField make_far_field(const InitialDataSpec& spec, int n) {
  return [spec, n](int comp, const Point& x) { return spec.g[comp].eval(x, n); };
}

ScalarFarField make_scalar_far_field(const InitialDataSpec& spec, int n) {
  return [spec, n](const Point& x) {
    double rho = 0.0;
    for (const ComponentRecipe& r : spec.g) rho += r.eval(x, n);
    return rho;
  };
}

ordered_json certificate_json(const SignCertificate& cert) {
  ordered_json j;
  j["case"] = to_string(cert.spec.kind);
  j["n"] = cert.spec.n;
  j["alpha"] = cert.spec.alpha;
  j["R"] = cert.spec.R;
  j["T"] = cert.spec.T;
  j["c"] = cert.spec.c;
  j["c_hat"] = cert.spec.c_hat;
  j["c_bar"] = cert.spec.c_bar;
  j["epsilon"] = cert.epsilon;
  j["region"] = cert.region_description;
  j["certified_coefficient"] = cert.coefficient;
  j["samples"] = cert.samples;
  j["max_limit_residual_violation"] = cert.max_limit_residual;
  j["max_kinetic_residual_violation"] = cert.max_kinetic_residual;
  j["min_sandwich_low"] = cert.min_sandwich_low;
  j["max_sandwich_high"] = cert.max_sandwich_high;
  j["limit_sign_ok"] = cert.limit_sign_ok;
  j["kinetic_sign_ok"] = cert.kinetic_sign_ok;
  j["sandwich_ok"] = cert.sandwich_ok;
  return j;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::string& config_text) {
  ExperimentResult result;
  result.output_dir = cfg.output_dir;
  fs::create_directories(cfg.output_dir);
  ManifestWriter manifest(cfg.output_dir);

  write_text(cfg.output_dir + "/config_echo.json", config_text);
  manifest.add("config_echo.json");

  const std::vector<Field> g = build(cfg.initial, cfg.grid, cfg.model);
  const FarField ff = make_far_field(cfg.initial, cfg.model.n);
  const ScalarFarField sff = make_scalar_far_field(cfg.initial, cfg.model.n);
  const bool frozen = cfg.grid.boundary == Boundary::frozen_far_field;

  SolverOptions sopts;
  sopts.threads = cfg.threads;
  const Region K = centered_box(cfg.grid, 0.5);

  std::vector<double> snapshot_times = cfg.snapshot_times;
  if ((cfg.lower_barrier || cfg.upper_barrier) &&
      (snapshot_times.empty() || snapshot_times.front() > 0.0))
    snapshot_times.insert(snapshot_times.begin(), 0.0);  // audit precondition

  // kinetic sweep
  std::vector<KineticRun> runs;
  for (double eps : cfg.epsilons) {
    ModelParams params = cfg.model;
    params.epsilon = eps;
    KineticState init = make_state(cfg.grid, params.n, 0.0);
    init.u = g;
    KineticRun run = advance(init, params, cfg.rate, cfg.t_end,
                             snapshot_times, sopts,
                             frozen ? &ff : nullptr, K);
    const std::string dir = "kinetic_eps_" + eps_tag(eps);
    fs::create_directories(cfg.output_dir + "/" + dir);
    for (size_t s = 0; s < run.snapshots.size(); ++s) {
      Snapshot snap;
      snap.kind = Snapshot::SolverKind::kinetic;
      snap.grid = cfg.grid;
      snap.t = run.snapshots[s].t;
      snap.fields = run.snapshots[s].u;
      const std::string rel = dir + "/snap_" + std::to_string(s) + ".cks";
      write_snapshot(cfg.output_dir + "/" + rel, snap);
      manifest.add(rel);
    }
    {
      const KineticState& last = run.snapshots.back();
      std::vector<std::string> names;
      for (int i = 0; i < 2 * cfg.model.n; ++i)
        names.push_back("u" + std::to_string(i + 1));
      write_snapshot_csv(cfg.output_dir + "/" + dir + "/snap_final.csv",
                         cfg.grid, last.t, last.u, names);
      manifest.add(dir + "/snap_final.csv");
    }
    run.write_step_log_csv(cfg.output_dir + "/" + dir + "/steplog.csv");
    manifest.add(dir + "/steplog.csv");
    runs.push_back(std::move(run));
  }

  // limit run on the same grid and schedule
  Field rho0 = Field::Zero(cfg.grid.size());
  for (const Field& f : g) rho0 += f;
  LimitOptions lopts;
  lopts.threads = cfg.threads;
  LimitRun limit = advance_limit(rho0, cfg.model, cfg.grid, cfg.t_end,
                                 snapshot_times, lopts,
                                 frozen ? &sff : nullptr);
  fs::create_directories(cfg.output_dir + "/limit");
  for (size_t s = 0; s < limit.snapshots.size(); ++s) {
    Snapshot snap;
    snap.kind = Snapshot::SolverKind::limit;
    snap.grid = cfg.grid;
    snap.t = limit.snapshots[s].t;
    snap.fields = {limit.snapshots[s].rho};
    const std::string rel = "limit/snap_" + std::to_string(s) + ".cks";
    write_snapshot(cfg.output_dir + "/" + rel, snap);
    manifest.add(rel);
  }
  write_snapshot_csv(cfg.output_dir + "/limit/snap_final.csv", cfg.grid,
                     limit.snapshots.back().t, {limit.snapshots.back().rho},
                     {"rho"});
  manifest.add("limit/snap_final.csv");

  fs::create_directories(cfg.output_dir + "/diagnostics");
  ordered_json verdicts = ordered_json::array();
  auto push_verdict = [&](const Verdict& v) {
    ordered_json j;
    j["name"] = v.name;
    j["pass"] = v.pass;
    j["tolerance"] = v.tolerance;
    j["worst"] = v.worst;
    j["witness_cell"] = v.witness_cell;
    j["witness_time"] = v.witness_time;
    verdicts.push_back(j);
  };

  if (cfg.diagnostics.convergence) {
    result.convergence = convergence_report(runs, limit, K);
    result.ran_convergence = true;
    std::ostringstream csv;
    csv << "epsilon,e_value,isotropy_gap\n";
    for (const SweepRow& row : result.convergence.rows)
      csv << fmt(row.epsilon) << "," << fmt(row.e_value) << ","
          << fmt(row.isotropy_gap) << "\n";
    write_text(cfg.output_dir + "/diagnostics/convergence.csv", csv.str());
    manifest.add("diagnostics/convergence.csv");
    double worst_ratio = 0.0;
    for (size_t i = 0; i + 1 < result.convergence.rows.size(); ++i)
      worst_ratio = std::max(worst_ratio,
                             result.convergence.rows[i + 1].e_value /
                                 result.convergence.rows[i].e_value);
    push_verdict({"e_strictly_decreasing",
                  result.convergence.e_strictly_decreasing, 1.0, worst_ratio,
                  -1, cfg.t_end});
    push_verdict({"isotropy_gap_strictly_decreasing",
                  result.convergence.gap_strictly_decreasing, 1.0, 0.0, -1,
                  cfg.t_end});
  }

  if (cfg.diagnostics.flux_l2) {
    TestCutoff phi;
    phi.kind = TestCutoff::Kind::tensor_cosine;
    for (int a = 0; a < cfg.grid.n; ++a)
      phi.center[a] = cfg.grid.origin[a] + 0.5 * cfg.grid.extent(a);
    phi.radius = 0.375 * cfg.grid.extent(0);
    std::ostringstream csv;
    csv << "epsilon,flux_l2,flux_l2_weighted\n";
    for (const KineticRun& run : runs) {
      const FluxL2 f = flux_l2(run, phi);
      csv << fmt(run.params.epsilon) << "," << fmt(f.plain) << ","
          << fmt(f.weighted) << "\n";
    }
    write_text(cfg.output_dir + "/diagnostics/flux_l2.csv", csv.str());
    manifest.add("diagnostics/flux_l2.csv");
  }

  if (cfg.diagnostics.ficks) {
    std::ostringstream csv;
    csv << "epsilon,t,ficks_residual_l2\n";
    for (const KineticRun& run : runs)
      for (const KineticState& s : run.snapshots) {
        const FicksResidual r = ficks_residual(s, run.params, cfg.rate, K);
        csv << fmt(run.params.epsilon) << "," << fmt(s.t) << ","
            << fmt(r.total_l2) << "\n";
      }
    write_text(cfg.output_dir + "/diagnostics/ficks.csv", csv.str());
    manifest.add("diagnostics/ficks.csv");
  }

  if (cfg.diagnostics.contraction) {
    // a second, ordered run from seeded bump data exercises the contraction
    // and comparison series
    std::mt19937_64 rng(cfg.seed);
    auto uni = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    Point center = Point::Zero();
    for (int a = 0; a < cfg.grid.n; ++a)
      center[a] = cfg.grid.origin[a] + uni() * cfg.grid.extent(a);
    const Primitive bump =
        gaussian_bump(0.25, 0.125 * cfg.grid.extent(0), center);
    std::ostringstream csv;
    csv << "epsilon,t,positive_part_l1,ordering_margin\n";
    for (double eps : cfg.epsilons) {
      ModelParams params = cfg.model;
      params.epsilon = eps;
      InitialDataSpec lifted = cfg.initial;
      for (ComponentRecipe& r : lifted.g) r.parts.push_back(bump);
      KineticState init_lo = make_state(cfg.grid, params.n, 0.0);
      init_lo.u = g;
      KineticState init_hi = make_state(cfg.grid, params.n, 0.0);
      init_hi.u = build(lifted, cfg.grid, cfg.model);
      const FarField ff_hi = make_far_field(lifted, cfg.model.n);
      KineticRun lo = advance(init_lo, params, cfg.rate, cfg.t_end,
                              snapshot_times, sopts, frozen ? &ff : nullptr);
      KineticRun hi = advance(init_hi, params, cfg.rate, cfg.t_end,
                              snapshot_times, sopts,
                              frozen ? &ff_hi : nullptr);
      for (size_t s = 0; s < lo.snapshots.size(); ++s) {
        csv << fmt(eps) << "," << fmt(lo.snapshots[s].t) << ","
            << fmt(positive_part_l1(hi.snapshots[s], lo.snapshots[s])) << ","
            << fmt(ordering_margin(lo.snapshots[s], hi.snapshots[s])) << "\n";
      }
    }
    write_text(cfg.output_dir + "/diagnostics/contraction.csv", csv.str());
    manifest.add("diagnostics/contraction.csv");
  }

  if (cfg.diagnostics.entropy) {
    TestCutoff phi;
    phi.kind = TestCutoff::Kind::tensor_cosine;
    for (int a = 0; a < cfg.grid.n; ++a)
      phi.center[a] = cfg.grid.origin[a] + 0.5 * cfg.grid.extent(a);
    phi.radius = 0.375 * cfg.grid.extent(0);
    std::ostringstream csv;
    csv << "epsilon,t,entropy\n";
    for (const KineticRun& run : runs)
      for (const auto& [t, v] : entropy_series(run, phi))
        csv << fmt(run.params.epsilon) << "," << fmt(t) << "," << fmt(v) << "\n";
    write_text(cfg.output_dir + "/diagnostics/entropy.csv", csv.str());
    manifest.add("diagnostics/entropy.csv");
  }

  if (cfg.lower_barrier || cfg.upper_barrier) {
    ordered_json audits = ordered_json::array();
    for (const KineticRun& run : runs) {
      const BarrierAudit audit = barrier_bound_audit(
          run, cfg.lower_barrier ? &*cfg.lower_barrier : nullptr,
          cfg.upper_barrier ? &*cfg.upper_barrier : nullptr, K);
      ordered_json a;
      a["epsilon"] = run.params.epsilon;
      if (audit.has_lower) a["lower_margin"] = audit.lower_margin;
      if (audit.has_upper) a["upper_margin"] = audit.upper_margin;
      a["worst_time"] = audit.worst_time;
      a["worst_cell"] = audit.worst_cell;
      audits.push_back(a);
      if (audit.has_lower)
        push_verdict({"lower_barrier_margin_eps_" + eps_tag(run.params.epsilon),
                      audit.lower_margin >= -1e-6, -1e-6, audit.lower_margin,
                      audit.worst_cell, audit.worst_time});
      if (audit.has_upper)
        push_verdict({"upper_barrier_margin_eps_" + eps_tag(run.params.epsilon),
                      audit.upper_margin <= 1e-6, 1e-6, audit.upper_margin,
                      audit.worst_cell, audit.worst_time});
    }
    write_text(cfg.output_dir + "/diagnostics/barrier_audit.json",
               audits.dump(2) + "\n");
    manifest.add("diagnostics/barrier_audit.json");
  }

  // mass audit is always on
  {
    std::ostringstream csv;
    csv << "epsilon,mass_initial,mass_final,relative_drift\n";
    for (const KineticRun& run : runs) {
      const double m0 = run.log.front().mass;
      const double m1 = run.log.back().mass;
      const double drift = std::abs(m1 - m0) / std::max(1e-300, std::abs(m0));
      csv << fmt(run.params.epsilon) << "," << fmt(m0) << "," << fmt(m1) << ","
          << fmt(drift) << "\n";
      if (cfg.grid.boundary == Boundary::periodic)
        push_verdict({"mass_drift_eps_" + eps_tag(run.params.epsilon),
                      drift <= 1e-12 * std::max(1.0, cfg.t_end),
                      1e-12 * std::max(1.0, cfg.t_end), drift, -1,
                      run.log.back().t});
    }
    const double lm0 = mass(limit.snapshots.front().rho, cfg.grid);
    const double lm1 = mass(limit.snapshots.back().rho, cfg.grid);
    csv << "limit," << fmt(lm0) << "," << fmt(lm1) << ","
        << fmt(std::abs(lm1 - lm0) / std::max(1e-300, std::abs(lm0))) << "\n";
    write_text(cfg.output_dir + "/diagnostics/mass.csv", csv.str());
    manifest.add("diagnostics/mass.csv");
  }

  {
    ordered_json rep;
    rep["verdicts"] = verdicts;
    ordered_json dod = ordered_json::array();
    for (const KineticRun& run : runs)
      if (run.dod_warning) dod.push_back(run.dod_message);
    rep["dod_warnings"] = dod;
    write_text(cfg.output_dir + "/diagnostics/report.json", rep.dump(2) + "\n");
    manifest.add("diagnostics/report.json");
  }

  const std::string cfg_digest_src = cfg.output_dir + "/config_echo.json";
  result.manifest_path = manifest.finalize(sha256_file(cfg_digest_src), cfg.seed);
  result.files = manifest.files();
  return result;
}

std::vector<std::string> certify_barriers_experiment(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  std::vector<std::string> written;
  std::vector<std::pair<std::string, BarrierSpec>> specs;
  if (cfg.lower_barrier) specs.emplace_back("lower", *cfg.lower_barrier);
  if (cfg.upper_barrier) specs.emplace_back("upper", *cfg.upper_barrier);
  if (specs.empty())
    throw std::invalid_argument("certify-barriers: config has no barrier blocks");

  for (auto& [label, spec] : specs) {
    if (spec.kind == BarrierCase::super_fde)
      spec = calibrate_super_fde_radius(spec, 2000, cfg.seed + 7);
    for (double eps : cfg.epsilons) {
      ModelParams params = cfg.model;
      params.epsilon = eps;
      CertifyOptions copts;
      copts.seed = cfg.seed + 11;
      const SignCertificate cert = certify_barrier(spec, params, cfg.rate, copts);
      const std::string rel =
          "certificate_" + label + "_eps_" + eps_tag(eps) + ".json";
      std::ofstream os(cfg.output_dir + "/" + rel);
      os << certificate_json(cert).dump(2) << "\n";
      written.push_back(rel);
    }
  }
  return written;
}

std::string report_from_artifacts(const std::string& dir) {
  std::ostringstream out;
  out << "artifact report for " << dir << "\n";

  // mass audit from the snapshots themselves
  std::vector<fs::path> kinetic_dirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory() && e.path().filename().string().rfind("kinetic_eps_", 0) == 0)
      kinetic_dirs.push_back(e.path());
  std::sort(kinetic_dirs.begin(), kinetic_dirs.end());

  ordered_json j;
  ordered_json runs = ordered_json::array();
  for (const fs::path& kd : kinetic_dirs) {
    std::vector<fs::path> snaps;
    for (const auto& e : fs::directory_iterator(kd))
      if (e.path().extension() == ".cks") snaps.push_back(e.path());
    std::sort(snaps.begin(), snaps.end());
    if (snaps.empty()) continue;
    const Snapshot first = read_snapshot(snaps.front().string());
    const Snapshot last = read_snapshot(snaps.back().string());
    auto total = [](const Snapshot& s) {
      double acc = 0.0;
      for (const Field& f : s.fields) acc += f.sum();
      return acc * s.grid.cell_volume();
    };
    ordered_json r;
    r["dir"] = kd.filename().string();
    r["snapshots"] = snaps.size();
    r["t_first"] = first.t;
    r["t_last"] = last.t;
    r["mass_first"] = total(first);
    r["mass_last"] = total(last);
    runs.push_back(r);
    out << "  " << kd.filename().string() << ": " << snaps.size()
        << " snapshots, t in [" << first.t << ", " << last.t << "], mass "
        << total(first) << " -> " << total(last) << "\n";
  }
  j["runs"] = runs;

  if (fs::exists(dir + "/diagnostics/convergence.csv")) {
    std::ifstream is(dir + "/diagnostics/convergence.csv");
    std::string line;
    std::getline(is, line);
    ordered_json sweep = ordered_json::array();
    out << "  convergence sweep (epsilon, e, isotropy gap):\n";
    while (std::getline(is, line)) {
      out << "    " << line << "\n";
      sweep.push_back(line);
    }
    j["convergence_csv_rows"] = sweep;
  }

  write_text(dir + "/report.json", j.dump(2) + "\n");
  out << "  wrote report.json\n";
  return out.str();
}

}  // namespace carleman
