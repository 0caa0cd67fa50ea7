#include "deadcore/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include "json.hpp"

#include "deadcore/errors.hpp"
#include "deadcore/radial.hpp"

namespace deadcore {

namespace pt = boost::property_tree;

double parse_number(const std::string& raw) {
  const std::string text = boost::algorithm::trim_copy(raw);
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    const double den = parse_number(text.substr(slash + 1));
    if (den == 0.0) throw Error(ErrorKind::InvalidArgument, "zero denominator in '" + text + "'");
    return parse_number(text.substr(0, slash)) / den;
  }
  double out = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || text.empty())
    throw Error(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig out;
  std::istringstream in(text);
  try {
    pt::read_ini(in, out.tree_);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("malformed config: ") + e.message() + " at line " +
                                                std::to_string(e.line()));
  }
  return out;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot read config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  if (boost::algorithm::ends_with(path, ".json")) {
    try {
      const auto manifest = nlohmann::json::parse(buf.str());
      return parse(manifest.at("config").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, std::string("malformed manifest: ") + e.what());
    }
  }
  return parse(buf.str());
}

std::string ExperimentConfig::to_string() const {
  std::ostringstream out;
  pt::write_ini(out, tree_);
  return out.str();
}

bool ExperimentConfig::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

std::string ExperimentConfig::get(const std::string& key, const std::string& fallback) const {
  return boost::algorithm::trim_copy(tree_.get<std::string>(key, fallback));
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_number(get(key, ""));
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, key + ": " + e.what());
  }
}

long ExperimentConfig::get_long(const std::string& key, long fallback) const {
  const double v = get_double(key, static_cast<double>(fallback));
  if (v != std::floor(v)) throw Error(ErrorKind::InvalidArgument, key + " must be an integer");
  return static_cast<long>(v);
}

bool ExperimentConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = boost::algorithm::to_lower_copy(get(key, ""));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorKind::InvalidArgument, key + " must be a boolean");
}

std::vector<double> ExperimentConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::string> parts;
  const std::string text = get(key, "");
  std::vector<double> out;
  if (text.empty()) return out;
  boost::algorithm::split(parts, text, boost::is_any_of(","));
  for (const auto& s : parts) {
    try {
      out.push_back(parse_number(s));
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidArgument, key + ": " + e.what());
    }
  }
  return out;
}

std::vector<Point> ExperimentConfig::get_points(const std::string& key, int dim,
                                                const std::vector<Point>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::string> groups;
  const std::string text = get(key, "");
  std::vector<Point> out;
  if (text.empty()) return out;
  boost::algorithm::split(groups, text, boost::is_any_of(";"));
  for (const auto& g : groups) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, g, boost::is_any_of(","));
    if (static_cast<int>(parts.size()) != dim)
      throw Error(ErrorKind::InvalidArgument, key + ": expected " + std::to_string(dim) + " coordinates per point");
    Point x(dim);
    for (int d = 0; d < dim; ++d) x[d] = parse_number(parts[static_cast<std::size_t>(d)]);
    out.push_back(x);
  }
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) { tree_.put(key, value); }

StructuralParams problem_params(const ExperimentConfig& cfg) {
  return StructuralParams::make(static_cast<int>(cfg.get_long("problem.n", 2)), cfg.get_double("problem.p", 2.0),
                                cfg.get_double("problem.gamma", 0.0), cfg.get_double("problem.m", 0.0));
}

ThieleSpec problem_thiele(const ExperimentConfig& cfg) {
  const std::string kind = cfg.get("problem.thiele", "constant");
  if (kind == "constant") return ThieleSpec::constant(cfg.get_double("problem.lambda", 1.0));
  if (kind == "henon") {
    const int n = static_cast<int>(cfg.get_long("problem.n", 2));
    return ThieleSpec::henon(cfg.get_double("problem.henon_weight", 1.0), cfg.get_double("problem.henon_alpha", 1.0),
                             cfg.get_points("problem.henon_set", n, {Point::Zero(n)}));
  }
  throw Error(ErrorKind::InvalidArgument, "problem.thiele must be constant or henon");
}

BoundaryData problem_boundary(const ExperimentConfig& cfg, const StructuralParams& params, const ThieleSpec& thiele) {
  const std::string kind = cfg.get("problem.boundary", "zero");
  const int n = params.n;
  const auto centers = cfg.get_points("problem.boundary_center", n, {Point::Zero(n)});
  if (centers.size() != 1) throw Error(ErrorKind::InvalidArgument, "problem.boundary_center must be one point");
  const Point center = centers.front();
  const double scale = cfg.get_double("problem.boundary_scale", 1.0);
  if (kind == "zero") return [](const Point&) { return 0.0; };
  if (kind == "constant") {
    const double v = cfg.get_double("problem.boundary_value", 1.0);
    return [v](const Point&) { return v; };
  }
  if (kind == "linear") {
    const double v = cfg.get_double("problem.boundary_value", 0.0);
    const double s = cfg.get_double("problem.boundary_slope", 1.0);
    return [v, s](const Point& x) { return v + s * x[0]; };
  }
  if (kind == "cos_theta") {
    return [center](const Point& x) {
      const Point d = x - center;
      const double r = d.norm();
      return r > 0.0 ? d[0] / r : 0.0;
    };
  }
  if (kind == "radial") {
    const double lambda = cfg.get_double("problem.boundary_lambda", thiele.lambda0());
    const auto profile =
        RadialDeadCore::make(params, lambda, center, cfg.get_double("problem.boundary_core_radius", 0.0));
    return [profile, scale](const Point& x) { return scale * profile.value(x); };
  }
  if (kind == "power") {
    const double c = cfg.get_double("problem.boundary_coefficient", 1.0);
    const double s = cfg.get_double("problem.boundary_power", 2.0);
    return [c, s, center](const Point& x) { return c * std::pow((x - center).norm(), s); };
  }
  if (kind == "henon") {
    if (thiele.variant() != ThieleSpec::Variant::henon || thiele.henon_set().size() != 1)
      throw Error(ErrorKind::InvalidArgument, "henon boundary data needs a one-point henon modulus");
    const double c = scale * henon_profile_constant(params, thiele.henon_weight(), thiele.henon_alpha());
    const double b = compute_beta_henon(params, thiele.henon_alpha());
    const Point f = thiele.henon_set().front();
    return [c, b, f](const Point& x) { return c * std::pow((x - f).norm(), b); };
  }
  throw Error(ErrorKind::InvalidArgument, "unknown problem.boundary '" + kind + "'");
}

GridDomain grid_domain(const ExperimentConfig& cfg, int dim, const std::string& section) {
  const std::string shape = cfg.get(section + ".shape", "box");
  const double h = cfg.get_double(section + ".h", 1.0 / 32.0);
  const int halo = static_cast<int>(cfg.get_long(section + ".halo", 0));
  if (shape == "box") {
    const auto lo = cfg.get_points(section + ".lo", dim, {Point::Constant(dim, -1.0)});
    const auto hi = cfg.get_points(section + ".hi", dim, {Point::Constant(dim, 1.0)});
    if (lo.size() != 1 || hi.size() != 1) throw Error(ErrorKind::InvalidArgument, "box corners must be single points");
    return GridDomain::box(lo.front(), hi.front(), h, halo);
  }
  if (shape == "ball") {
    const auto c = cfg.get_points(section + ".center", dim, {Point::Zero(dim)});
    if (c.size() != 1) throw Error(ErrorKind::InvalidArgument, "ball center must be a single point");
    return GridDomain::ball(c.front(), cfg.get_double(section + ".radius", 1.0), h, halo);
  }
  throw Error(ErrorKind::InvalidArgument, section + ".shape must be box or ball");
}

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig s;
  const std::string scheme = cfg.get("solver.scheme", "fd_relax");
  if (scheme == "fd_relax") s.scheme = Scheme::fd_relax;
  else if (scheme == "dpp_iter") s.scheme = Scheme::dpp_iter;
  else throw Error(ErrorKind::InvalidArgument, "solver.scheme must be fd_relax or dpp_iter");
  s.eps_g = cfg.get_double("solver.eps_g", s.eps_g);
  s.relax = cfg.get_double("solver.relax", s.relax);
  s.tol = cfg.get_double("solver.tol", s.tol);
  s.max_iter = cfg.get_long("solver.max_iter", s.max_iter);
  s.eps_dpp = cfg.get_double("solver.eps_dpp", s.eps_dpp);
  s.nested = cfg.get_bool("solver.nested", s.nested);
  return s;
}

}  // namespace deadcore
