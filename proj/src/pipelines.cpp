#include "deadcore/pipelines.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "deadcore/csv.hpp"
#include "deadcore/errors.hpp"
#include "deadcore/geometry.hpp"
#include "deadcore/operators.hpp"
#include "json.hpp"

namespace deadcore {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kGoldenAngle = 2.39996322972865332;

std::string out_path(const RunOptions& opt, const std::string& name) {
  return (std::filesystem::path(opt.out_dir) / name).string();
}

}  // namespace

std::vector<Point> radial_sample_points(int n, const Point& center, double r, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    const double t = count > 1 ? 0.05 + 0.95 * i / (count - 1) : 0.5;
    Point dir(n);
    if (n == 1) dir[0] = i % 2 == 0 ? 1.0 : -1.0;
    else dir = make_point(std::cos(kGoldenAngle * i), std::sin(kGoldenAngle * i));
    out.push_back(center + (r + t) * dir);
  }
  return out;
}

std::vector<RadialRow> radial_sweep(const RadialSweepSpec& spec) {
  std::vector<RadialRow> out;
  for (int n : spec.n)
    for (double p : spec.p)
      for (double gamma : spec.gamma)
        for (double mf : spec.m_factor) {
          const auto params = StructuralParams::make(n, p, gamma, mf * (gamma + 1.0));
          if (params.critical()) throw Error(ErrorKind::CriticalRegime, "radial profile needs m < gamma + 1");
          const double r = n == 1 ? spec.core_radius_1d : spec.core_radius_2d;
          for (double lambda : spec.lambda0) {
            const auto profile = RadialDeadCore::make(params, lambda, Point::Zero(n), r);
            const auto thiele = ThieleSpec::constant(lambda);
            for (const Point& x : radial_sample_points(n, Point::Zero(n), r, spec.samples)) {
              const FieldSample s = radial_eval(profile, x);
              RadialRow row;
              row.n = n;
              row.p = p;
              row.gamma = gamma;
              row.m = params.m;
              row.lambda0 = lambda;
              row.core_radius = r;
              row.x = x;
              row.rho = x.norm();
              row.value = s.value;
              row.abs_residual = std::abs(pde_residual(s, x, params, thiele).value);
              out.push_back(std::move(row));
            }
          }
        }
  return out;
}

double relative_sup_error(const SolutionField& u, const RadialDeadCore& profile) {
  double err = 0.0, sup = 0.0;
  for (Index k : u.grid.interior_nodes()) {
    const double exact = profile.value(u.grid.position(k));
    err = std::max(err, std::abs(u.values[k] - exact));
    sup = std::max(sup, exact);
  }
  return sup > 0.0 ? err / sup : err;
}

std::vector<RefinementRow> refinement_sweep(const StructuralParams& params, double lambda, double core_radius,
                                            const std::vector<double>& hs, const SolverConfig& config) {
  std::vector<RefinementRow> out;
  const int n = params.n;
  const auto profile = RadialDeadCore::make(params, lambda, Point::Zero(n), core_radius);
  const ProblemSpec problem(params, ThieleSpec::constant(lambda), profile.as_function());
  for (double h : hs) {
    const auto grid = GridDomain::box(Point::Constant(n, -1.0), Point::Constant(n, 1.0), h);
    const SolutionField u = solve_dirichlet(problem, grid, config);
    RefinementRow row;
    row.h = h;
    row.rel_sup_error = relative_sup_error(u, profile);
    row.factor = out.empty() || row.rel_sup_error == 0.0 ? 0.0 : out.back().rel_sup_error / row.rel_sup_error;
    row.iterations = u.report.iterations;
    row.converged = u.report.converged;
    out.push_back(row);
  }
  return out;
}

std::vector<LiouvilleRow> liouville_sweep(const LiouvilleSpec& spec, const StructuralParams& params, double lambda,
                                          const SolverConfig& config) {
  const double beta = compute_beta(params);
  const double cnd = compute_cnd(params, lambda);
  if (spec.mode == LiouvilleMode::bounded_level && !(spec.theta >= 0.0 && spec.theta < 1.0))
    throw Error(ErrorKind::InvalidArgument, "level theta must lie in [0, 1)");
  const double s = spec.growth < 0.0 ? 0.5 * beta : spec.growth;
  if (spec.mode == LiouvilleMode::growth && !(s < beta))
    throw Error(ErrorKind::InvalidArgument, "growth rate must stay below beta");
  std::vector<Point> probes = spec.probes;
  if (probes.empty())
    for (int i = 0; i < 4; ++i) probes.push_back(Point(Point::Unit(params.n, 0) * i));

  const auto grid = GridDomain::ball(Point::Zero(params.n), 1.0, spec.h);
  std::vector<LiouvilleRow> out;
  for (double R : spec.R) {
    if (!(R > 0.0)) throw Error(ErrorKind::InvalidArgument, "radii must be positive");
    const double data =
        spec.mode == LiouvilleMode::bounded_level ? spec.theta * cnd * std::pow(R, beta) : spec.k0 * std::pow(R, s);
    const double kappa = data > 0.0 ? data : 1.0;
    const double factor = std::pow(R, 2.0 + params.gamma) / std::pow(kappa, params.gamma + 1.0 - params.m);
    const ThieleSpec unit_thiele = ThieleSpec::constant(lambda).scaled(factor, R);
    const double level = data / kappa;
    const ProblemSpec unit(params, unit_thiele, [level](const Point&) { return level; });
    const SolutionField w = solve_dirichlet(unit, grid, config);
    std::optional<LiouvilleSupersolution> v;
    try {
      v = LiouvilleSupersolution::make(data, R, params, lambda);
    } catch (const Error&) {
      v.reset();
    }
    for (const Point& x : probes) {
      if (x.norm() > R) throw Error(ErrorKind::InvalidArgument, "probe outside B_R");
      LiouvilleRow row;
      row.R = R;
      row.boundary_ratio = data / (cnd * std::pow(R, beta));
      row.probe = x;
      row.u_probe = kappa * w.interpolate(x / R);
      row.v_probe = v ? v->value(x) : kNaN;
      row.iterations = w.report.iterations;
      row.converged = w.report.converged;
      out.push_back(row);
    }
  }
  return out;
}

GameRun play_game(const GridDomain& grid, const GameConfig& game, const Point& x0, const SolverConfig& config) {
  GameRun out;
  out.dpp = dpp_iterate(grid, game.payoff, game.p, game.eps, config);
  if (!out.dpp.report.converged) throw NonConvergence{"mean-value iteration did not converge"};
  out.stats = run_game(x0, out.dpp, game);
  return out;
}

namespace {

using json = nlohmann::json;

json report_json(const SolveReport& r) {
  return {{"iterations", r.iterations},          {"max_update", r.max_update},
          {"residual_norm", r.residual_norm},    {"bracket_violations", r.bracket_violations},
          {"converged", r.converged},            {"levels", r.levels}};
}

void require_converged(const SolutionField& u, const std::string& what) {
  if (!u.report.converged) throw NonConvergence{what + " did not converge within max_iter"};
}

json cmd_radial(const RunOptions& opt) {
  const auto& c = opt.config;
  RadialSweepSpec spec;
  spec.n.clear();
  for (double v : c.get_list("radial.n", {1, 2})) spec.n.push_back(static_cast<int>(v));
  spec.p = c.get_list("radial.p", spec.p);
  spec.gamma = c.get_list("radial.gamma", spec.gamma);
  spec.m_factor = c.get_list("radial.m_factor", spec.m_factor);
  spec.lambda0 = c.get_list("radial.lambda0", spec.lambda0);
  spec.samples = static_cast<int>(c.get_long("radial.samples", spec.samples));
  spec.core_radius_1d = c.get_double("radial.core_radius_1d", spec.core_radius_1d);
  spec.core_radius_2d = c.get_double("radial.core_radius_2d", spec.core_radius_2d);
  const auto rows = radial_sweep(spec);
  CsvWriter csv(out_path(opt, "radial.csv"),
                {"n", "p", "gamma", "m", "lambda0", "core_radius", "x", "y", "rho", "value", "abs_residual"});
  double worst = 0.0;
  for (const auto& r : rows) {
    csv.row({static_cast<long>(r.n), r.p, r.gamma, r.m, r.lambda0, r.core_radius, r.x[0],
             r.x.size() > 1 ? r.x[1] : 0.0, r.rho, r.value, r.abs_residual});
    worst = std::max(worst, r.abs_residual);
  }
  return {{"rows", rows.size()}, {"max_abs_residual", worst}, {"outputs", {"radial.csv"}}};
}

void write_snapshot(const SolutionField& u, const std::string& path) {
  CsvWriter csv(path, {"x", "y", "u"});
  for (Index k = 0; k < u.grid.size(); ++k) {
    if (u.grid.kind(k) == NodeKind::outside) continue;
    const Point x = u.grid.position(k);
    csv.row({x[0], x.size() > 1 ? x[1] : 0.0, u.values[k]});
  }
}

SolutionField read_snapshot(const GridDomain& grid, const std::string& path) {
  const CsvTable t = read_csv(path);
  const std::size_t cx = t.column("x"), cy = t.column("y"), cu = t.column("u");
  SolutionField u{grid, Eigen::VectorXd::Zero(grid.size()), {}};
  u.report.converged = true;
  for (const auto& row : t.rows) {
    Point x = grid.dim() == 1 ? make_point(parse_number(row[cx])) : make_point(parse_number(row[cx]), parse_number(row[cy]));
    const Index k = grid.nearest_node(x);
    if ((grid.position(k) - x).norm() > 1e-6 * grid.h())
      throw Error(ErrorKind::InvalidArgument, "snapshot does not match the configured grid");
    u.values[k] = parse_number(row[cu]);
  }
  return u;
}

json cmd_solve(const RunOptions& opt) {
  const auto& c = opt.config;
  const auto params = problem_params(c);
  const auto thiele = problem_thiele(c);
  const auto g = problem_boundary(c, params, thiele);
  const auto grid = grid_domain(c, params.n);
  SolverConfig sc = solver_config(c);
  sc.threads = opt.threads;
  const ProblemSpec problem(params, thiele, g);
  const SolutionField u = solve_dirichlet(problem, grid, sc);
  write_snapshot(u, out_path(opt, "solution.csv"));
  json summary = {{"report", report_json(u.report)}, {"outputs", {"solution.csv"}}};
  const auto set = positivity_set(u, sc.u_tol());
  summary["dead_core_fraction"] =
      grid.interior_nodes().empty()
          ? 0.0
          : static_cast<double>(set.dead_core_nodes.size()) / static_cast<double>(grid.interior_nodes().size());
  if (c.get("problem.boundary", "zero") == "radial" && !params.critical()) {
    const auto profile = RadialDeadCore::make(params, c.get_double("problem.boundary_lambda", thiele.lambda0()),
                                              c.get_points("problem.boundary_center", params.n, {Point::Zero(params.n)}).front(),
                                              c.get_double("problem.boundary_core_radius", 0.0));
    if (c.get_double("problem.boundary_scale", 1.0) == 1.0) summary["rel_sup_error"] = relative_sup_error(u, profile);
  }
  require_converged(u, "solve");
  return summary;
}

// Geometry reports share one schema: quantity, r, statistic, target, status.
class ReportCsv {
 public:
  ReportCsv(const std::string& path) : csv_(path, {"quantity", "r", "statistic", "target", "status"}) {}
  void row(const std::string& q, double r, double stat, double target, const std::string& status = "ok") {
    csv_.row({q, r, stat, target, status});
  }
  void failure(const Error& e) { csv_.row({std::string("error"), kNaN, kNaN, kNaN, std::string(to_string(e.kind()))}); }

 private:
  CsvWriter csv_;
};

json cmd_analyze(const RunOptions& opt) {
  const auto& c = opt.config;
  const auto params = problem_params(c);
  const auto thiele = problem_thiele(c);
  const auto grid = grid_domain(c, params.n);
  const SolverConfig sc = solver_config(c);
  const double u_tol = c.get_double("analysis.u_tol", sc.u_tol());

  SolutionField u;
  if (c.get_bool("analysis.analytic_profile", false)) {
    const auto g = problem_boundary(c, params, thiele);
    u = SolutionField{grid, grid.sample(g), {}};
    u.report.converged = true;
  } else {
    if (!c.has("analysis.snapshot")) throw Error(ErrorKind::InvalidArgument, "analysis.snapshot is required");
    u = read_snapshot(grid, c.get("analysis.snapshot", ""));
  }
  const std::vector<double> radii = c.get_list("analysis.radii", {});
  const double h = grid.h();
  const std::vector<double> pradii = c.get_list("analysis.porosity_radii", {8 * h, 16 * h, 32 * h});
  const auto set = positivity_set(u, u_tol);

  const std::vector<std::string> names{"growth", "nondegeneracy", "density", "porosity", "gradient", "l2avg", "distance"};
  json summary = {{"outputs", json::array()}};
  for (const auto& n : names) summary["outputs"].push_back(n + ".csv");
  summary["outputs"].push_back("fits.csv");
  ReportCsv growth(out_path(opt, "growth.csv")), nondeg(out_path(opt, "nondegeneracy.csv")),
      density(out_path(opt, "density.csv")), porosity(out_path(opt, "porosity.csv")),
      gradient(out_path(opt, "gradient.csv")), l2(out_path(opt, "l2avg.csv")), dist(out_path(opt, "distance.csv"));
  CsvWriter fits(out_path(opt, "fits.csv"), {"report", "exponent", "intercept", "target", "rel_dev", "rms_residual", "n_radii"});

  if (!set.has_free_boundary()) {
    const Error e(ErrorKind::NoFreeBoundary, "free boundary is empty");
    for (ReportCsv* r : {&growth, &nondeg, &density, &porosity, &gradient, &l2, &dist}) r->failure(e);
    summary["free_boundary"] = false;
    return summary;
  }
  summary["free_boundary"] = true;

  const Point center = grid.shape() == DomainShape::ball ? grid.center() : Point(0.5 * (grid.lo() + grid.hi()));
  const Point dir = Point::Unit(params.n, 0);
  Point x0, xpos;
  if (c.get("analysis.x0", "auto") == "auto") {
    xpos = first_positive_along(u, u_tol, center, dir);
    x0 = nearest_free_boundary_point(set, xpos);
  } else {
    x0 = c.get_points("analysis.x0", params.n).front();
    xpos = x0;
  }
  if (c.has("analysis.x0_nondegeneracy")) xpos = c.get_points("analysis.x0_nondegeneracy", params.n).front();
  summary["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());

  auto fit_rows = [&fits](const std::string& name, const FitReport& f) {
    fits.row({name, f.exponent, f.intercept, f.target, f.rel_dev, f.rms_residual, static_cast<long>(f.radii.size())});
  };
  auto skipped_rows = [](ReportCsv& csv, const std::string& q, const std::vector<double>& skipped) {
    for (double r : skipped) csv.row(q, r, kNaN, kNaN, "skipped");
  };

  try {
    const FitReport f = fit_growth_exponent(u, x0, radii, params, thiele, u_tol);
    for (std::size_t i = 0; i < f.radii.size(); ++i) growth.row("sup", f.radii[i], f.values[i], f.target);
    skipped_rows(growth, "sup", f.skipped);
    fit_rows("growth", f);
    summary["growth_exponent"] = f.exponent;
  } catch (const Error& e) {
    growth.failure(e);
  }
  try {
    const auto r = check_nondegeneracy(u, xpos, radii, params, thiele.lambda0(), u_tol);
    for (std::size_t i = 0; i < r.radii.size(); ++i) nondeg.row("ratio", r.radii[i], r.ratios[i], 1.0);
    summary["nondegeneracy_min_ratio"] = r.min_ratio;
  } catch (const Error& e) {
    nondeg.failure(e);
  }
  try {
    const auto r = measure_density(u, x0, radii, u_tol);
    for (std::size_t i = 0; i < r.radii.size(); ++i) density.row("theta", r.radii[i], r.theta[i], 0.1);
    skipped_rows(density, "theta", r.skipped);
    summary["density_min"] = r.min_theta;
  } catch (const Error& e) {
    density.failure(e);
  }
  try {
    const auto r = estimate_porosity(u, pradii, u_tol);
    for (std::size_t i = 0; i < r.radii.size(); ++i) {
      porosity.row("delta_min", r.radii[i], r.delta_min[i], 0.0, r.cells_used[i] ? "ok" : "skipped");
      porosity.row("delta_median", r.radii[i], r.delta_median[i], 0.0, r.cells_used[i] ? "ok" : "skipped");
    }
    summary["porosity_min"] = r.delta_overall_min;
  } catch (const Error& e) {
    porosity.failure(e);
  }
  try {
    const FitReport f = fit_gradient_decay(u, x0, radii, params, u_tol);
    for (std::size_t i = 0; i < f.radii.size(); ++i) gradient.row("grad_sup", f.radii[i], f.values[i], f.target);
    skipped_rows(gradient, "grad_sup", f.skipped);
    fit_rows("gradient", f);
    summary["gradient_exponent"] = f.exponent;
  } catch (const Error& e) {
    gradient.failure(e);
  }
  try {
    const auto r = l2_hessian_average(u, x0, radii, params, u_tol);
    for (std::size_t i = 0; i < r.radii.size(); ++i) l2.row("S", r.radii[i], r.S[i], r.target);
    skipped_rows(l2, "S", r.skipped);
    fits.row({std::string("l2avg"), r.slope, std::log(r.bound), r.target, kNaN, kNaN, static_cast<long>(r.radii.size())});
    summary["l2_slope"] = r.slope;
  } catch (const Error& e) {
    l2.failure(e);
  }
  try {
    const auto r = distance_bounds(u, params, u_tol);
    dist.row("max_ratio", kNaN, r.max_ratio, kNaN);
    dist.row("min_ratio", 4.0 * h, r.min_ratio, kNaN);
    summary["distance_ratio"] = r.max_ratio / r.min_ratio;
  } catch (const Error& e) {
    dist.failure(e);
  }
  return summary;
}

GameConfig game_config(const ExperimentConfig& c, const GridDomain& grid, std::uint64_t seed) {
  GameConfig g;
  g.p = c.get_double("game.p", 2.0);
  g.eps = c.get_double("game.eps", c.get_double("game.eps_h", 4.0) * grid.h());
  g.n_walks = c.get_long("game.n_walks", 100000);
  g.max_steps = c.get_long("game.max_steps", 0);
  g.seed = seed;
  const std::string kind = c.get("game.payoff", "cos_theta");
  const double sign = c.get_bool("game.negate", false) ? -1.0 : 1.0;
  BoundaryData F;
  if (kind == "cos_theta") {
    const Point center = grid.shape() == DomainShape::ball ? grid.center() : Point(0.5 * (grid.lo() + grid.hi()));
    F = [center](const Point& x) {
      const Point d = x - center;
      const double r = d.norm();
      return r > 0.0 ? d[0] / r : 0.0;
    };
  } else if (kind == "linear") {
    const double v = c.get_double("game.payoff_value", 0.0), s = c.get_double("game.payoff_slope", 1.0);
    F = [v, s](const Point& x) { return v + s * x[0]; };
  } else if (kind == "constant") {
    const double v = c.get_double("game.payoff_value", 1.0);
    F = [v](const Point&) { return v; };
  } else {
    throw Error(ErrorKind::InvalidArgument, "game.payoff must be cos_theta, linear or constant");
  }
  if (c.get_bool("game.normal_extension", false)) F = extend_along_normal(grid, F);
  g.payoff = [F, sign](const Point& x) { return sign * F(x); };
  return g;
}

json cmd_game(const RunOptions& opt, std::uint64_t seed) {
  const auto& c = opt.config;
  const int n = static_cast<int>(c.get_long("problem.n", 2));
  // The strip must cover one step: default halo from eps.
  ExperimentConfig cfg = c;
  const double h = c.get_double("grid.h", 1.0 / 32.0);
  const double eps = c.get_double("game.eps", c.get_double("game.eps_h", 4.0) * h);
  if (!c.has("grid.halo")) cfg.set("grid.halo", std::to_string(static_cast<long>(std::ceil(eps / h - 1e-9))));
  const auto grid = grid_domain(cfg, n);
  const GameConfig game = game_config(cfg, grid, seed);
  SolverConfig sc = solver_config(c);
  sc.threads = opt.threads;
  const auto x0s = c.get_points("game.x0", n, {grid.shape() == DomainShape::ball ? grid.center() : Point(0.5 * (grid.lo() + grid.hi()))});
  const GameRun run = play_game(grid, game, x0s.front(), sc);
  CsvWriter csv(out_path(opt, "game.csv"), {"p", "eps", "n_walks", "seed", "x0", "y0", "mean", "sd", "ci_half_width",
                                             "mean_exit_time", "truncated", "value_ref", "consistent"});
  const auto& s = run.stats;
  const Point& x0 = x0s.front();
  csv.row({game.p, game.eps, s.n_walks, std::to_string(seed), x0[0], n > 1 ? x0[1] : 0.0, s.mean, s.sd,
           s.ci_half_width, s.mean_exit_time, s.truncated, s.value_ref, static_cast<long>(s.consistent)});
  return {{"dpp_report", report_json(run.dpp.report)},
          {"mean", s.mean},
          {"value_ref", s.value_ref},
          {"ci_half_width", s.ci_half_width},
          {"truncation_warning", s.truncation_warning},
          {"outputs", {"game.csv"}}};
}

json cmd_liouville(const RunOptions& opt) {
  const auto& c = opt.config;
  const auto params = problem_params(c);
  LiouvilleSpec spec;
  const std::string mode = c.get("liouville.mode", "II");
  if (mode == "II") spec.mode = LiouvilleMode::bounded_level;
  else if (mode == "I") spec.mode = LiouvilleMode::growth;
  else throw Error(ErrorKind::InvalidArgument, "liouville.mode must be I or II");
  spec.theta = c.get_double("liouville.theta", spec.theta);
  spec.k0 = c.get_double("liouville.k0", spec.k0);
  spec.growth = c.get_double("liouville.growth", spec.growth);
  spec.R = c.get_list("liouville.R", spec.R);
  spec.probes = c.get_points("liouville.probes", params.n, {});
  spec.h = c.get_double("liouville.h", spec.h);
  SolverConfig sc = solver_config(c);
  sc.threads = opt.threads;
  const auto rows = liouville_sweep(spec, params, c.get_double("problem.lambda", 1.0), sc);
  CsvWriter csv(out_path(opt, "liouville.csv"), {"R", "boundary_ratio", "probe_x", "probe_y", "u_probe", "v_probe"});
  bool converged = true;
  for (const auto& r : rows) {
    csv.row({r.R, r.boundary_ratio, r.probe[0], r.probe.size() > 1 ? r.probe[1] : 0.0, r.u_probe, r.v_probe});
    converged = converged && r.converged;
  }
  if (!converged) throw NonConvergence{"a Liouville solve did not converge"};
  return {{"rows", rows.size()}, {"outputs", {"liouville.csv"}}};
}

json cmd_sweep(const RunOptions& opt) {
  const auto& c = opt.config;
  const auto params = problem_params(c);
  SolverConfig sc = solver_config(c);
  sc.threads = opt.threads;
  const std::string kind = c.get("sweep.kind", "refinement");
  if (kind == "refinement") {
    const auto rows = refinement_sweep(params, c.get_double("problem.lambda", 1.0),
                                       c.get_double("problem.boundary_core_radius", 0.0),
                                       c.get_list("sweep.h", {1.0 / 16, 1.0 / 32, 1.0 / 64}), sc);
    CsvWriter csv(out_path(opt, "sweep.csv"), {"h", "rel_sup_error", "factor", "iterations", "converged"});
    bool ok = true;
    for (const auto& r : rows) {
      csv.row({r.h, r.rel_sup_error, r.factor, r.iterations, static_cast<long>(r.converged)});
      ok = ok && r.converged;
    }
    if (!ok) throw NonConvergence{"a refinement solve did not converge"};
    return {{"rows", rows.size()}, {"outputs", {"sweep.csv"}}};
  }
  if (kind == "flatness") {
    const auto thiele = problem_thiele(c);
    const auto grid = grid_domain(c, params.n);
    CsvWriter csv(out_path(opt, "flatness.csv"),
                  {"zeta", "sup_half_ball", "p_harmonic_sup_half_ball", "iterations", "converged"});
    bool ok = true;
    for (double z : c.get_list("sweep.zeta", {1.0, 0.5, 0.25, 0.125})) {
      const auto r = flatness_experiment(z, params, thiele, grid, sc);
      csv.row({z, r.sup_half_ball, r.p_harmonic_sup_half_ball, r.solution.report.iterations,
               static_cast<long>(r.solution.report.converged)});
      ok = ok && r.solution.report.converged;
    }
    if (!ok) throw NonConvergence{"a flatness solve did not converge"};
    return {{"outputs", {"flatness.csv"}}};
  }
  throw Error(ErrorKind::InvalidArgument, "sweep.kind must be refinement or flatness");
}

}  // namespace

int run_command(const RunOptions& opt, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  json manifest = {{"command", opt.command},
                   {"config", opt.config.to_string()},
                   {"threads", opt.threads},
                   {"version", kVersion}};
  int code = 0;
  std::uint64_t seed = 0;
  try {
    seed = opt.seed ? *opt.seed : static_cast<std::uint64_t>(opt.config.get_long("run.seed", 0));
    manifest["seed"] = seed;
    std::filesystem::create_directories(opt.out_dir);
    json summary;
    if (opt.command == "radial") summary = cmd_radial(opt);
    else if (opt.command == "solve") summary = cmd_solve(opt);
    else if (opt.command == "analyze") summary = cmd_analyze(opt);
    else if (opt.command == "game") summary = cmd_game(opt, seed);
    else if (opt.command == "liouville") summary = cmd_liouville(opt);
    else if (opt.command == "sweep") summary = cmd_sweep(opt);
    else throw Error(ErrorKind::InvalidArgument, "unknown command '" + opt.command + "'");
    manifest["summary"] = summary;
  } catch (const NonConvergence& e) {
    log << "error: " << e.what << '\n';
    manifest["error"] = e.what;
    code = 3;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    manifest["error"] = e.what();
    code = 2;
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    manifest["error"] = e.what();
    code = 2;
  }
  manifest["exit_code"] = code;
  manifest["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::error_code ec;
  if (std::filesystem::is_directory(opt.out_dir, ec)) {
    std::ofstream(out_path(opt, "manifest.json")) << manifest.dump(2) << '\n';
  }
  return code;
}

}  // namespace deadcore
