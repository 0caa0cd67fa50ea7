#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "deadcore/game.hpp"
#include "deadcore/grid.hpp"
#include "deadcore/params.hpp"
#include "deadcore/solver.hpp"

namespace deadcore {

/// INI experiment file: `[section]` blocks of `key = value` lines, arrays as
/// comma lists, point lists separated by `;`. Malformed input throws
/// Error(InvalidArgument).
class ExperimentConfig {
 public:
  ExperimentConfig() = default;
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);  ///< .ini text or a run manifest (.json)

  std::string to_string() const;
  bool operator==(const ExperimentConfig& other) const { return tree_ == other.tree_; }

  bool has(const std::string& key) const;  ///< "section.key"
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback = {}) const;
  std::vector<Point> get_points(const std::string& key, int dim, const std::vector<Point>& fallback = {}) const;
  void set(const std::string& key, const std::string& value);

  const boost::property_tree::ptree& tree() const { return tree_; }

 private:
  boost::property_tree::ptree tree_;
};

/// Typed views of the standard sections.
StructuralParams problem_params(const ExperimentConfig& cfg);
ThieleSpec problem_thiele(const ExperimentConfig& cfg);
BoundaryData problem_boundary(const ExperimentConfig& cfg, const StructuralParams& params,
                              const ThieleSpec& thiele);
GridDomain grid_domain(const ExperimentConfig& cfg, int dim, const std::string& section = "grid");
SolverConfig solver_config(const ExperimentConfig& cfg);

/// Parses a fraction like "1/64" or a plain number.
double parse_number(const std::string& text);

}  // namespace deadcore
