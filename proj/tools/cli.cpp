#include "cli.hpp"

#include "curvelab/concentration.hpp"
#include "curvelab/config.hpp"
#include "curvelab/homog.hpp"
#include "curvelab/io.hpp"
#include "curvelab/levelset.hpp"
#include "curvelab/manifest.hpp"
#include "curvelab/mcharness.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <sstream>

namespace curvelab {

namespace {

namespace fs = std::filesystem;

struct Run {
  Config cfg;
  fs::path out;
  WorkerPool pool;
  RunManifest manifest;

  void output(const std::string& name) { manifest.outputs.push_back(name); }
  fs::path file(const std::string& name) {
    output(name);
    return out / name;
  }
};

Grid2D centred_grid(double half, double dx) {
  return Grid2D::covering(Rect{{-half, -half}, {half, half}}, dx);
}

Point point_of(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 2) throw ConfigError(key + " must hold two numbers");
  return {v[0], v[1]};
}

FieldConfig field_from(const Config& c) {
  FieldConfig f;
  f.a = c.num("field.a");
  f.f_uni = c.num("field.f_uni");
  f.delta_f = c.num("field.delta_f");
  f.intensity = c.num("field.intensity");
  const std::string& shape = c.str("field.shape");
  if (shape == "cone") f.shape = ObstacleShape::cone(c.num("field.peak"));
  else if (shape == "plateau") f.shape = ObstacleShape::plateau(c.num("field.peak"));
  else if (shape == "table") f.shape = ObstacleShape::load_table(c.str("field.table"));
  else throw ConfigError("field.shape must be cone, plateau or table");
  f.seed = c.u64("run.seed");
  f.c1a = c.num("field.c1a");
  f.c1f = c.num("field.c1f");
  if (c.num("field.ring_radius") > 0.0)
    f.extra_points = ring_points(point_of(c.list("field.ring_center"), "field.ring_center"),
                                 c.num("field.ring_radius"), c.num("field.ring_spacing"));
  return f;
}

SolverParams solver_from(const Config& c) {
  SolverParams p;
  p.cfl = c.num("levelset.cfl");
  p.reinit_every = c.integer("levelset.reinit_every");
  p.band = c.integer("levelset.band");
  p.record_dt = c.num("levelset.record_dt");
  p.eps_grad = c.num("levelset.eps_grad");
  p.validate();
  return p;
}

ArrivalSettings arrival_from(const Config& c) {
  ArrivalSettings a;
  a.v_min = c.num("arrival.v_min");
  a.c_s = c.num("arrival.c_s");
  a.solver = solver_from(c);
  return a;
}

std::string arrival_csv(const std::vector<ArrivalRecord>& recs) {
  std::string s = arrival_csv_header() + "\n";
  for (const ArrivalRecord& r : recs) s += arrival_csv_row(r) + "\n";
  return s;
}

void write_summary(Run& run, const EnsembleStats& st, bool complete) {
  auto j = nlohmann::json::parse(st.to_json());
  j["complete"] = complete;
  io::write_text(run.file("summary.json"), j.dump(2) + "\n");
  std::vector<double> d, s, nz;
  for (const ScaleStats& x : st.scales) {
    d.push_back(x.dist);
    s.push_back(x.std);
    nz.push_back(x.normalized);
  }
  io::write_dat(run.file("fluct.dat"), "dist std", d, s);
  io::write_dat(run.file("normalized.dat"), "dist std/sqrt(h*dist)", d, nz);
}

// --- subcommands -----------------------------------------------------------

void cmd_gen_field(Run& run) {
  const Config& c = run.cfg;
  const Grid2D g = centred_grid(c.num("field.half"), c.num("field.dx"));
  const CoefficientField cf = field_from(c).realize(g.extent(), 0);
  const SampledField f = sample(cf, g);
  io::write_gmh1(run.file("forcing.gmh1"), g, f.f, 0.0);
  io::write_gmh1(run.file("curvature.gmh1"), g, f.a, 0.0);
  if (cf.obstacles()) io::write_text(run.file("obstacles.csv"), io::points_csv(cf.obstacles()->points().points));
  const nlohmann::json j{{"schema", 1},     {"nx", g.nx},         {"ny", g.ny},
                         {"dx", g.dx},      {"origin", {g.origin.x(), g.origin.y()}},
                         {"c1a", cf.c1a()}, {"c1f", cf.c1f()},    {"a_max", f.a_max},
                         {"f_max", f.f_max},
                         {"obstacles", cf.obstacles() ? cf.obstacles()->points().points.size() : 0}};
  io::write_text(run.file("field.json"), j.dump(2) + "\n");
}

void cmd_evolve(Run& run) {
  const Config& c = run.cfg;
  const std::string& shape = c.str("evolve.shape");
  GridSet s;
  if (shape == "pbm") {
    s = io::read_pbm(c.str("evolve.input"));
  } else {
    const Grid2D g = centred_grid(c.num("evolve.half"), c.num("evolve.dx"));
    const Point ctr = point_of(c.list("evolve.center"), "evolve.center");
    const double r = c.num("evolve.radius");
    if (shape == "disk")
      s = GridSet::from_predicate(g, [&](const Point& p) { return (p - ctr).norm() <= r; });
    else if (shape == "halfplane")
      s = GridSet::from_predicate(g, [&](const Point& p) { return p.y() <= ctr.y(); });
    else
      throw ConfigError("evolve.shape must be disk, halfplane or pbm");
  }
  const SolverParams p = solver_from(c);
  const SampledField f = sample(field_from(c).realize(s.grid.extent(), 0), s.grid);
  LevelSetState st = init_from_set(s, p.band);
  std::vector<double> t, area, radius;
  const double cell = s.grid.dx * s.grid.dx;
  int k = 0;
  evolve(st, f, c.num("evolve.horizon"), p, [&](const LevelSetState& x) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05d.gmh1", k++);
    io::write_gmh1(run.file(name), x.grid, x.u, x.t);
    const double a = static_cast<double>((x.u <= 0.0).count()) * cell;
    t.push_back(x.t);
    area.push_back(a);
    radius.push_back(std::sqrt(a / std::numbers::pi));
    return true;
  });
  io::write_dat(run.file("area.dat"), "t area", t, area);
  io::write_dat(run.file("radius.dat"), "t sqrt(area/pi)", t, radius);
  io::write_pbm(run.file("final.pbm"), st.zero_set());
  run.output("final.pbm.json");
}

void cmd_arrival(Run& run) {
  const Config& c = run.cfg;
  const Grid2D g = centred_grid(c.num("arrival.half"), c.num("arrival.dx"));
  const double r0 = c.num("arrival.source_radius");
  const GridSet s = GridSet::from_predicate(g, [&](const Point& p) { return p.norm() <= r0; });
  const Point x0 = point_of(c.list("arrival.x0"), "arrival.x0");
  const FieldConfig fc = field_from(c);
  const ArrivalSettings as = arrival_from(c);
  const double h = c.num("arrival.h"), t_max = c.num("arrival.t_max");
  const int n = c.integer("arrival.seeds");
  if (n < 1) throw ConfigError("arrival.seeds must be >= 1");
  std::vector<ArrivalRecord> recs(n);
  run.pool.run(n, [&](std::size_t i) {
    const SampledField f = sample(fc.realize(g.extent(), i), g);
    recs[i] = t_max > 0.0 ? arrival_time(f, s, x0, t_max, as.solver) : truncated_arrival(f, s, x0, h, as);
    recs[i].seed = i;
  });
  io::write_text(run.file("arrival.csv"), arrival_csv(recs));
  ScaleRecords sr{recs.front().dist, recs.front().target_radius, recs};
  write_summary(run, fluct_report({sr}, c.integer("mcharness.min_uncensored")), true);
}

void cmd_vhom(Run& run) {
  const Config& c = run.cfg;
  VhomOptions o;
  o.beta = c.num("homog.beta");
  o.c_beta = c.num("homog.c_beta");
  o.arrival = arrival_from(c);
  o.dx = c.num("homog.dx");
  o.shift_by_scale = c.flag("homog.shift_by_scale");
  const VhomEstimate est =
      estimate_vhom(field_from(c), Point(0.0, 1.0), c.list("homog.scales"), c.num("homog.theta"),
                    c.integer("homog.seeds"), c.num("homog.delta_f"), o, run.pool);
  std::string csv = "r,h,n,mean,std,se,uncensored,v_hat,flagged\n";
  std::vector<ArrivalRecord> all;
  std::vector<double> rs, vs;
  for (std::size_t k = 0; k < est.r_list.size(); ++k) {
    csv += io::fmt(est.r_list[k]) + ',' + io::fmt(est.h[k]) + ',' + std::to_string(est.n_seeds) + ',' +
           io::fmt(est.means[k]) + ',' + io::fmt(est.stds[k]) + ',' + io::fmt(est.ses[k]) + ',' +
           io::fmt(est.uncensored[k]) + ',' + io::fmt(est.v_hat[k]) + ',' + (est.flagged[k] ? "1" : "0") + '\n';
    all.insert(all.end(), est.records[k].begin(), est.records[k].end());
    rs.push_back(est.r_list[k]);
    vs.push_back(est.v_hat[k]);
  }
  io::write_text(run.file("vhat.csv"), csv);
  io::write_text(run.file("arrival.csv"), arrival_csv(all));
  io::write_dat(run.file("vhat.dat"), "r v_hat", rs, vs);
}

void cmd_fluct(Run& run) {
  const Config& c = run.cfg;
  EnsembleConfig e;
  e.master_seed = c.u64("run.seed");
  e.n_seeds = c.integer("mcharness.seeds");
  e.field = field_from(c);
  e.dists = c.list("mcharness.dists");
  e.h_exponent = c.num("mcharness.h_exponent");
  e.h_fixed = c.num("mcharness.h_fixed");
  e.dx = c.num("mcharness.dx");
  e.arrival = arrival_from(c);
  e.workers = run.pool.workers();
  run.output("records/");
  run.output("arrival.csv");
  const EnsembleResult r = run_ensemble(e, run.pool, run.out);
  // Rewrites run_ensemble's summary.json with the configured threshold.
  write_summary(run, fluct_report(r.scales, c.integer("mcharness.min_uncensored")), r.complete);
  if (!r.complete) {
    for (const std::string& f : r.failures) std::cerr << "failed realization " << f << "\n";
    throw NumericError(std::to_string(r.failures.size()) + " realizations failed; run is incomplete");
  }
}

void cmd_ball_hole(Run& run, bool ball) {
  const Config& c = run.cfg;
  BallHoleOptions o;
  o.R_inner = c.num("homog.R_inner");
  o.c_tau = c.num("homog.c_tau");
  o.v_hom = c.num("homog.v_hom");
  o.arrival = arrival_from(c);
  o.dx = c.num("homog.dx");
  const FieldConfig fc = field_from(c);
  const double R = c.num("homog.R_eps"), th = c.num("homog.theta"), eta = c.num("homog.eta");
  const int n = c.integer("homog.ball_seeds");
  const BallHoleReport rep = ball ? ball_experiment(fc, R, th, eta, n, o, run.pool)
                                  : hole_experiment(fc, R, th, eta, n, o, run.pool);
  std::string csv = "n,R_from,R_to,r,h,c,mean,std,bound,tau,targets,censored,flagged\n";
  for (std::size_t k = 0; k < rep.steps.size(); ++k) {
    const StepStats& s = rep.steps[k];
    csv += std::to_string(k + 1) + ',' + io::fmt(s.R_from) + ',' + io::fmt(s.R_to) + ',' + io::fmt(s.r) + ',' +
           io::fmt(s.h) + ',' + io::fmt(rep.schedule.c[k]) + ',' + io::fmt(s.mean) + ',' + io::fmt(s.std) + ',' +
           io::fmt(s.bound) + ',' + io::fmt(s.tau) + ',' + std::to_string(s.targets) + ',' +
           std::to_string(s.censored) + ',' + (s.flagged ? "1" : "0") + '\n';
  }
  io::write_text(run.file("steps.csv"), csv);
  csv = "seed,sum_t,full_run\n";
  for (std::size_t i = 0; i < rep.sum_t.size(); ++i)
    csv += std::to_string(i) + ',' + io::fmt(rep.sum_t[i]) + ',' + io::fmt(rep.full_run[i]) + '\n';
  io::write_text(run.file("sums.csv"), csv);
  std::vector<double> idx;
  for (std::size_t k = 0; k < rep.schedule.radii.size(); ++k) idx.push_back(static_cast<double>(k));
  io::write_dat(run.file("schedule.dat"), "n R_n", idx, rep.schedule.radii);
  const nlohmann::json j{{"schema", 1},
                         {"experiment", ball ? "ball" : "hole"},
                         {"gamma", rep.schedule.gamma},
                         {"exact_rule", rep.schedule.exact_rule},
                         {"steps", rep.steps.size()}};
  io::write_text(run.file("schedule.json"), j.dump(2) + "\n");
}

void cmd_boxcheck(Run& run) {
  const Config& c = run.cfg;
  BoxOptions o;
  o.dx = c.num("mcharness.box.dx");
  o.collar = c.num("mcharness.box.collar");
  o.stabilize_time = c.num("mcharness.box.stabilize_time");
  o.h = c.num("mcharness.box.h");
  o.v_min = c.num("arrival.v_min");
  o.solver = solver_from(c);
  const BoxResult r = box_criterion(c.num("mcharness.box.r"), c.num("mcharness.box.w"), field_from(c),
                                    c.integer("mcharness.box.seeds"), c.num("mcharness.box.t_max"), o,
                                    run.pool);
  std::string csv = "seed,success,empty_seed,stagnated,time\n";
  for (const BoxOutcome& b : r.outcomes)
    csv += io::fmt(b.index) + ',' + (b.success ? "1" : "0") + ',' + (b.empty_seed ? "1" : "0") + ',' +
           (b.stagnated ? "1" : "0") + ',' + io::fmt(b.time) + '\n';
  io::write_text(run.file("box.csv"), csv);
  io::write_text(run.file("box.json"), r.to_json() + "\n");
  std::cout << "p_hat " << io::fmt(r.p_hat) << " [" << io::fmt(r.ci.lo) << ", " << io::fmt(r.ci.hi) << "]\n";
}

MartingalePaths walk_from(const Config& c) {
  return reflected_walk(c.integer("concentration.paths"), c.integer("concentration.N"),
                        c.integer("concentration.T"), c.u64("run.seed"));
}

void cmd_conc_verify(Run& run) {
  const Config& c = run.cfg;
  const MartingalePaths m = walk_from(c);
  AltReport alt = mc_verify_alt(m, c.integer("concentration.kmax"));
  alt.tail_C = c.num("concentration.tail_C");
  FiltrationSpec f;
  f.depth = c.integer("concentration.depth");
  f.min_block = c.integer("concentration.min_block");
  const HoeffdingReport hoeff = conditional_hoeffding_check(m, f);
  // E: the path touches the barrier.
  std::vector<char> touched(m.paths());
  for (int p = 0; p < m.paths(); ++p) touched[p] = m.values.row(p).abs().maxCoeff() >= m.T;
  const MaximalReport maxi = indicator_maximal_check(m, touched, c.num("concentration.delta"), f);
  const TailCalibration cal = calibrate_alt_tail(m);
  const bool pass = alt.pass && hoeff.pass && maxi.pass;
  const nlohmann::json j{{"schema", 1},
                         {"paths", m.paths()},
                         {"alt_moments", nlohmann::json::parse(alt.to_json())},
                         {"conditional_hoeffding", nlohmann::json::parse(hoeff.to_json())},
                         {"indicator_maximal", nlohmann::json::parse(maxi.to_json())},
                         {"tail", {{"C", alt.tail_C}, {"calibrated_C", cal.C}, {"pEc", cal.pEc}}},
                         {"pass", pass}};
  io::write_text(run.file("conc.json"), j.dump(2) + "\n");
  std::cout << (pass ? "pass" : "FAIL") << "\n";
}

void cmd_conc_export(Run& run) {
  export_paths(run.file("paths.bin"), walk_from(run.cfg));
  run.output("paths.bin.json");
}

// Rebuilds summary.json and the .dat files from an arrival.csv.
void cmd_report(Run& run, const fs::path& in) {
  const std::string text = io::read_text(in / "arrival.csv");
  std::istringstream is(text);
  std::string line;
  std::getline(is, line);
  if (line != arrival_csv_header()) throw DataError("unexpected arrival.csv header: " + line);
  std::vector<ScaleRecords> scales;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ls(line);
    for (std::string col; std::getline(ls, col, ',');) cols.push_back(col);
    if (cols.size() != 6) throw DataError("arrival.csv:" + std::to_string(line_no) + ": expected 6 columns");
    ArrivalRecord r;
    try {
      r.seed = std::stoull(cols[0]);
      r.dist = std::stod(cols[1]);
      r.target_radius = std::stod(cols[2]);
      r.value = std::stod(cols[3]);
      r.censored = cols[4] == "1";
      r.cap = std::stod(cols[5]);
    } catch (const std::exception&) {
      throw DataError("arrival.csv:" + std::to_string(line_no) + ": malformed row");
    }
    if (scales.empty() || scales.back().dist != r.dist || scales.back().h != r.target_radius)
      scales.push_back({r.dist, r.target_radius, {}});
    scales.back().records.push_back(r);
  }
  write_summary(run, fluct_report(scales, run.cfg.integer("mcharness.min_uncensored")), true);
}

int workers_from(int flag, const Config& c) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("CURVELAB_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("CURVELAB_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  return std::max(1, c.integer("run.workers"));
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Forced mean curvature flow through random obstacle fields", "curvelab"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out = "out", in;
  std::vector<std::string> sets;
  long long seed = -1;
  int workers = 0;
  bool force = false, dump = false;
  app.add_option("--config", config_path, "Config file (TOML subset) or a run manifest");
  app.add_option("--out", out, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Master seed")->check(CLI::NonNegativeNumber);
  app.add_option("--workers", workers, "Worker threads (fallback: CURVELAB_WORKERS)")->check(CLI::PositiveNumber);
  app.add_flag("--force", force, "Overwrite an existing run");
  app.add_option("--set", sets, "Config override key=value (repeatable)");
  app.add_flag("--dump-config", dump, "Print the effective configuration and exit");

  std::vector<double> scales, dists;
  int seeds = 0, paths = 0, N = 0, kmax = 0, T = 0;
  double horizon = -1.0;

  auto* gen = app.add_subcommand("gen-field", "Sample a field realization on a grid");
  auto* evo = app.add_subcommand("evolve", "Evolve an initial set, writing GMH1 snapshots");
  evo->add_option("--horizon", horizon, "Final time");
  auto* arr = app.add_subcommand("arrival", "Truncated arrival times over seeds");
  arr->add_option("--seeds", seeds, "Realizations");
  auto* vh = app.add_subcommand("vhom", "Homogenized speed estimate over scales");
  vh->add_option("--scales", scales, "Comma-separated scales r")->delimiter(',');
  vh->add_option("--seeds", seeds, "Realizations per scale");
  auto* fl = app.add_subcommand("fluct", "Fluctuation ensemble over distances");
  fl->add_option("--dists", dists, "Comma-separated distances")->delimiter(',');
  fl->add_option("--seeds", seeds, "Realizations per distance");
  auto* ball = app.add_subcommand("ball", "Growing-ball step experiment");
  ball->add_option("--seeds", seeds, "Realizations");
  auto* hole = app.add_subcommand("hole", "Shrinking-hole step experiment");
  hole->add_option("--seeds", seeds, "Realizations");
  auto* box = app.add_subcommand("boxcheck", "Box criterion success probability");
  box->add_option("--seeds", seeds, "Realizations");
  auto* conc = app.add_subcommand("conc", "Concentration inequality checks");
  conc->require_subcommand(1);
  auto* verify = conc->add_subcommand("verify-alt", "Monte Carlo check of the moment and tail bounds");
  auto* exp = conc->add_subcommand("export", "Write the reference walk as flat f64 binary");
  for (CLI::App* sc : {verify, exp}) {
    sc->add_option("--paths", paths, "Number of paths");
    sc->add_option("--N", N, "Steps per path");
    sc->add_option("--T", T, "Reflection barrier");
  }
  verify->add_option("--kmax", kmax, "Largest moment order k");
  auto* rep = app.add_subcommand("report", "Rebuild summaries from an arrival.csv without simulating");
  rep->add_option("--in", in, "Run directory holding arrival.csv")->required();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    Run run;
    if (!config_path.empty()) run.cfg.merge_file(config_path);
    for (const std::string& s : sets) run.cfg.set(s);
    if (seed >= 0) run.cfg.set_value("run.seed", static_cast<double>(seed));
    if (seeds > 0) {
      const char* key = vh->parsed() ? "homog.seeds" : fl->parsed() ? "mcharness.seeds"
                      : box->parsed() ? "mcharness.box.seeds" : arr->parsed() ? "arrival.seeds"
                                                                              : "homog.ball_seeds";
      run.cfg.set_value(key, static_cast<double>(seeds));
    }
    if (!scales.empty()) run.cfg.set_value("homog.scales", scales);
    if (!dists.empty()) run.cfg.set_value("mcharness.dists", dists);
    if (horizon >= 0.0) run.cfg.set_value("evolve.horizon", horizon);
    if (paths > 0) run.cfg.set_value("concentration.paths", static_cast<double>(paths));
    if (N > 0) run.cfg.set_value("concentration.N", static_cast<double>(N));
    if (T > 0) run.cfg.set_value("concentration.T", static_cast<double>(T));
    if (kmax > 0) run.cfg.set_value("concentration.kmax", static_cast<double>(kmax));
    if (dump) {
      std::cout << run.cfg.to_text();
      return kOk;
    }

    run.pool = WorkerPool(workers_from(workers, run.cfg));
    run.out = out;
    CLI::App* sub = app.get_subcommands().front();
    run.manifest.command = sub->get_name();
    if (sub == conc) run.manifest.command += " " + conc->get_subcommands().front()->get_name();
    run.manifest.config = run.cfg.to_text();
    run.manifest.master_seed = run.cfg.u64("run.seed");
    run.manifest.workers = run.pool.workers();
    run.manifest.schemas = {{"manifest", 1}, {"summary", 1}, {"gmh1", 1}, {"arrival_csv", 1}};
    if (sub == rep && fs::weakly_canonical(fs::path(in)) == fs::weakly_canonical(run.out))
      throw ConfigError("report needs an --out directory different from --in");
    begin_run(run.out, run.manifest, force);
    auto dispatch = [&](Run& r) {
      if (sub == gen) cmd_gen_field(r);
      else if (sub == evo) cmd_evolve(r);
      else if (sub == arr) cmd_arrival(r);
      else if (sub == vh) cmd_vhom(r);
      else if (sub == fl) cmd_fluct(r);
      else if (sub == ball) cmd_ball_hole(r, true);
      else if (sub == hole) cmd_ball_hole(r, false);
      else if (sub == box) cmd_boxcheck(r);
      else if (verify->parsed()) cmd_conc_verify(r);
      else if (sub == conc) cmd_conc_export(r);
      else cmd_report(r, in);
    };

    try {
      dispatch(run);
    } catch (...) {
      finish_run(run.out, run.manifest);
      throw;
    }
    run.manifest.complete = true;
    finish_run(run.out, run.manifest);
    return kOk;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kNumericError;
  } catch (const ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}

int cli_dispatch(int argc, char** argv) {
  return cli_dispatch(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace curvelab
