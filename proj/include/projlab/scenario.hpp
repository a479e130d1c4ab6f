// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "projlab/engine.hpp"
#include "projlab/family.hpp"
#include "projlab/matrix.hpp"

namespace projlab {

struct ProjectorSpec {
  std::vector<Vector> range;
  std::optional<std::vector<Vector>> kernel;  // absent: l2-orthogonal projector

  friend bool operator==(const ProjectorSpec&, const ProjectorSpec&) = default;
};

struct PairSpec {
  std::size_t first = 0;  // 0-based
  std::size_t second = 1;
  std::vector<Vector> kernel;

  friend bool operator==(const PairSpec&, const PairSpec&) = default;
};

struct OutputSpec {
  std::string dir = ".";
  bool svg = false;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

// A fully validated experiment description with every default filled in.
struct Scenario {
  std::size_t dim = 0;
  double p = 2.0;
  std::vector<double> weights;  // empty = unit weights
  std::vector<ProjectorSpec> projectors;
  std::vector<PairSpec> pair_projectors;  // empty = automatic for every pair
  std::vector<double> alphas;             // filled with uniform weights when absent
  std::optional<std::vector<Vector>> global_kernel;
  ScheduleSpec schedule;
  std::vector<std::uint64_t> seeds;  // multi-seed sweep; empty = schedule.seed only
  std::optional<double> lambda;
  std::vector<std::string> criteria;
  double q = 0.5;
  std::optional<double> beta;
  OutputSpec output;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Parse errors carry the line and column; validation errors name the field.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
nlohmann::ordered_json scenario_to_json(const Scenario& s);
void save_scenario(const Scenario& s, const std::string& path);

NormedSpace build_space(const Scenario& s);
// Projectors, pair projectors (CompatibilityError names the failing pair) and
// alphas. Consistency is left to the caller.
ProjectorFamily build_family(const Scenario& s);
std::optional<SubspaceBasis> global_kernel_basis(const Scenario& s);

}  // namespace projlab
