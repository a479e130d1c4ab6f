// SPDX-License-Identifier: Apache-2.0
#include "projlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "projlab/criteria.hpp"
#include "projlab/error.hpp"
#include "projlab/projector.hpp"

namespace projlab {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ValidationError(field, msg);
}

const json& require(const json& obj, const char* key, const std::string& field) {
  if (!obj.contains(key)) fail(field, "required");
  return obj.at(key);
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(field, "must be finite");
  return d;
}

std::size_t get_count(const json& v, const std::string& field, std::size_t min_value) {
  if (!v.is_number_integer()) fail(field, "must be an integer");
  const auto i = v.get<std::int64_t>();
  if (i < static_cast<std::int64_t>(min_value))
    fail(field, "must be at least " + std::to_string(min_value));
  return static_cast<std::size_t>(i);
}

std::uint64_t get_seed(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
    fail(field, "must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::vector<double> get_numbers(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(get_number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Vector> get_vectors(const json& v, const std::string& field, std::size_t dim) {
  if (!v.is_array()) fail(field, "must be an array of vectors");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = field + "[" + std::to_string(i) + "]";
    Vector vec = get_numbers(v[i], f);
    if (vec.size() != dim) fail(f, "vector length must equal space.dim");
    out.push_back(std::move(vec));
  }
  return out;
}

ScheduleKind parse_kind(const json& v) {
  if (!v.is_string()) fail("schedule.kind", "must be a string");
  const auto s = v.get<std::string>();
  if (s == "averaged") return ScheduleKind::averaged;
  if (s == "cyclic") return ScheduleKind::cyclic;
  if (s == "quasi_periodic") return ScheduleKind::quasi_periodic;
  if (s == "random") return ScheduleKind::random;
  fail("schedule.kind", "unknown kind '" + s + "'");
}

void check_probability(const std::vector<double>& v, const std::string& field) {
  double sum = 0.0;
  for (double x : v) {
    if (!(x > 0.0)) fail(field, "entries must be positive");
    sum += x;
  }
  if (std::fabs(sum - 1.0) > 1e-12) fail(field, "entries must sum to 1");
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      fail(where.empty() ? it.key() : where + "." + it.key(), "unknown field");
}

Scenario from_json(const json& root) {
  if (!root.is_object()) fail("(root)", "scenario must be a JSON object");
  check_keys(root,
             {"space", "projectors", "pair_projectors", "alphas", "global_projector", "schedule",
              "criteria", "q", "beta", "output"},
             "");
  Scenario s;

  const json& space = require(root, "space", "space");
  if (!space.is_object()) fail("space", "must be an object");
  check_keys(space, {"dim", "p", "weights"}, "space");
  s.dim = get_count(require(space, "dim", "space.dim"), "space.dim", 1);
  if (space.contains("p")) {
    const json& p = space.at("p");
    if (p.is_string()) {
      if (p.get<std::string>() != "inf") fail("space.p", "must be a number >= 1 or \"inf\"");
      s.p = kInfinity;
    } else {
      s.p = get_number(p, "space.p");
      if (s.p < 1.0) fail("space.p", "must be >= 1");
    }
  }
  if (space.contains("weights")) {
    s.weights = get_numbers(space.at("weights"), "space.weights");
    if (s.weights.size() != s.dim) fail("space.weights", "length must equal space.dim");
    for (double w : s.weights)
      if (!(w > 0.0)) fail("space.weights", "entries must be positive");
  }

  const json& projs = require(root, "projectors", "projectors");
  if (!projs.is_array() || projs.empty()) fail("projectors", "must be a non-empty array");
  for (std::size_t j = 0; j < projs.size(); ++j) {
    const std::string f = "projectors[" + std::to_string(j) + "]";
    if (!projs[j].is_object()) fail(f, "must be an object");
    check_keys(projs[j], {"range", "kernel"}, f);
    ProjectorSpec ps;
    ps.range = get_vectors(require(projs[j], "range", f + ".range"), f + ".range", s.dim);
    if (projs[j].contains("kernel"))
      ps.kernel = get_vectors(projs[j].at("kernel"), f + ".kernel", s.dim);
    s.projectors.push_back(std::move(ps));
  }
  const std::size_t n = s.projectors.size();

  if (root.contains("pair_projectors")) {
    const json& pp = root.at("pair_projectors");
    if (pp.is_string()) {
      if (pp.get<std::string>() != "auto") fail("pair_projectors", "must be \"auto\" or a list");
    } else if (pp.is_array()) {
      for (std::size_t i = 0; i < pp.size(); ++i) {
        const std::string f = "pair_projectors[" + std::to_string(i) + "]";
        if (!pp[i].is_object()) fail(f, "must be an object");
        check_keys(pp[i], {"pair", "kernel"}, f);
        const json& pair = require(pp[i], "pair", f + ".pair");
        if (!pair.is_array() || pair.size() != 2) fail(f + ".pair", "must be [j1, j2]");
        const std::size_t a = get_count(pair[0], f + ".pair", 1);
        const std::size_t b = get_count(pair[1], f + ".pair", 1);
        if (a > n || b > n || a == b) fail(f + ".pair", "indices must be distinct and in 1..n");
        PairSpec ps{std::min(a, b) - 1, std::max(a, b) - 1,
                    get_vectors(require(pp[i], "kernel", f + ".kernel"), f + ".kernel", s.dim)};
        for (const auto& other : s.pair_projectors)
          if (other.first == ps.first && other.second == ps.second) fail(f + ".pair", "duplicate pair");
        s.pair_projectors.push_back(std::move(ps));
      }
      std::sort(s.pair_projectors.begin(), s.pair_projectors.end(), [](const auto& x, const auto& y) {
        return std::pair(x.first, x.second) < std::pair(y.first, y.second);
      });
    } else {
      fail("pair_projectors", "must be \"auto\" or a list");
    }
  }

  if (root.contains("alphas")) {
    s.alphas = get_numbers(root.at("alphas"), "alphas");
    if (s.alphas.size() != n) fail("alphas", "length must equal the number of projectors");
    check_probability(s.alphas, "alphas");
  } else {
    s.alphas = WeightVector::uniform(n).values();
  }

  if (root.contains("global_projector")) {
    const json& g = root.at("global_projector");
    if (!g.is_object()) fail("global_projector", "must be an object");
    check_keys(g, {"kernel"}, "global_projector");
    s.global_kernel = get_vectors(require(g, "kernel", "global_projector.kernel"),
                                  "global_projector.kernel", s.dim);
  }

  if (root.contains("schedule")) {
    const json& sch = root.at("schedule");
    if (!sch.is_object()) fail("schedule", "must be an object");
    check_keys(sch, {"kind", "steps", "m", "tau", "mu", "seed", "seeds", "lambda"}, "schedule");
    s.schedule.kind = parse_kind(require(sch, "kind", "schedule.kind"));
    if (sch.contains("steps")) s.schedule.steps = get_count(sch.at("steps"), "schedule.steps", 1);
    if (sch.contains("seed")) s.schedule.seed = get_seed(sch.at("seed"), "schedule.seed");
    if (sch.contains("seeds")) {
      const json& seeds = sch.at("seeds");
      if (!seeds.is_array()) fail("schedule.seeds", "must be an array of integers");
      for (std::size_t i = 0; i < seeds.size(); ++i)
        s.seeds.push_back(get_seed(seeds[i], "schedule.seeds[" + std::to_string(i) + "]"));
    }
    if (sch.contains("lambda")) {
      s.lambda = get_number(sch.at("lambda"), "schedule.lambda");
      if (!(*s.lambda > 0.0 && *s.lambda <= 1.0)) fail("schedule.lambda", "must lie in (0, 1]");
    }
    switch (s.schedule.kind) {
      case ScheduleKind::quasi_periodic: {
        s.schedule.m = get_count(require(sch, "m", "schedule.m"), "schedule.m", 1);
        if (s.schedule.m < n) fail("schedule.m", "window length must be at least the number of projectors");
        if (sch.contains("tau")) {
          const json& tau = sch.at("tau");
          if (!tau.is_array() || tau.empty()) fail("schedule.tau", "must be a non-empty array");
          for (std::size_t i = 0; i < tau.size(); ++i) {
            const std::size_t t = get_count(tau[i], "schedule.tau[" + std::to_string(i) + "]", 1);
            if (t > n) fail("schedule.tau[" + std::to_string(i) + "]", "index exceeds the number of projectors");
            s.schedule.tau.push_back(t - 1);
          }
        } else if (!s.schedule.seed) {
          fail("schedule.seed", "seed required (or give tau)");
        }
        break;
      }
      case ScheduleKind::random: {
        if (!s.schedule.seed) fail("schedule.seed", "seed required");
        if (sch.contains("mu")) {
          s.schedule.mu = get_numbers(sch.at("mu"), "schedule.mu");
          if (s.schedule.mu.size() != n) fail("schedule.mu", "length must equal the number of projectors");
          check_probability(s.schedule.mu, "schedule.mu");
        } else {
          s.schedule.mu = WeightVector::uniform(n).values();
        }
        break;
      }
      default:
        break;
    }
  }

  if (root.contains("criteria")) {
    const json& c = root.at("criteria");
    if (!c.is_array()) fail("criteria", "must be an array of names");
    for (const auto& name : c) {
      if (!name.is_string()) fail("criteria", "names must be strings");
      const auto str = name.get<std::string>();
      if (std::find(all_criteria().begin(), all_criteria().end(), str) == all_criteria().end())
        fail("criteria", "unknown criterion '" + str + "'");
      if (std::find(s.criteria.begin(), s.criteria.end(), str) == s.criteria.end())
        s.criteria.push_back(str);
    }
  } else {
    s.criteria = all_criteria();
  }

  if (root.contains("q")) {
    s.q = get_number(root.at("q"), "q");
    if (!(s.q > 0.0 && s.q < 1.0)) fail("q", "must lie in (0, 1)");
  }
  if (root.contains("beta")) {
    s.beta = get_number(root.at("beta"), "beta");
    if (s.beta < 0.0) fail("beta", "must be non-negative");
  }
  if (root.contains("output")) {
    const json& o = root.at("output");
    if (!o.is_object()) fail("output", "must be an object");
    check_keys(o, {"dir", "svg"}, "output");
    if (o.contains("dir")) {
      if (!o.at("dir").is_string()) fail("output.dir", "must be a string");
      s.output.dir = o.at("dir").get<std::string>();
    }
    if (o.contains("svg")) {
      if (!o.at("svg").is_boolean()) fail("output.svg", "must be a boolean");
      s.output.svg = o.at("svg").get<bool>();
    }
  }
  return s;
}

ordered_json vectors_json(const std::vector<Vector>& vs) {
  ordered_json a = ordered_json::array();
  for (const auto& v : vs) a.push_back(v);
  return a;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line/column pair.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ValidationError("(parse)", "line " + std::to_string(line) + ", column " +
                                         std::to_string(col) + ": " + e.what());
  }
  return from_json(root);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

ordered_json scenario_to_json(const Scenario& s) {
  ordered_json j;
  ordered_json space = {{"dim", s.dim}};
  if (s.p == kInfinity)
    space["p"] = "inf";
  else
    space["p"] = s.p;
  if (!s.weights.empty()) space["weights"] = s.weights;
  j["space"] = space;

  ordered_json projs = ordered_json::array();
  for (const auto& p : s.projectors) {
    ordered_json o = {{"range", vectors_json(p.range)}};
    if (p.kernel) o["kernel"] = vectors_json(*p.kernel);
    projs.push_back(o);
  }
  j["projectors"] = projs;

  if (s.pair_projectors.empty()) {
    j["pair_projectors"] = "auto";
  } else {
    ordered_json pp = ordered_json::array();
    for (const auto& p : s.pair_projectors)
      pp.push_back({{"pair", {p.first + 1, p.second + 1}}, {"kernel", vectors_json(p.kernel)}});
    j["pair_projectors"] = pp;
  }
  j["alphas"] = s.alphas;
  if (s.global_kernel) j["global_projector"] = {{"kernel", vectors_json(*s.global_kernel)}};

  ordered_json sch = {{"kind", to_string(s.schedule.kind)}, {"steps", s.schedule.steps}};
  if (s.schedule.kind == ScheduleKind::quasi_periodic) {
    sch["m"] = s.schedule.m;
    if (!s.schedule.tau.empty()) {
      ordered_json tau = ordered_json::array();
      for (auto t : s.schedule.tau) tau.push_back(t + 1);
      sch["tau"] = tau;
    }
  }
  if (s.schedule.kind == ScheduleKind::random) sch["mu"] = s.schedule.mu;
  if (s.schedule.seed) sch["seed"] = *s.schedule.seed;
  if (!s.seeds.empty()) sch["seeds"] = s.seeds;
  if (s.lambda) sch["lambda"] = *s.lambda;
  j["schedule"] = sch;

  j["criteria"] = s.criteria;
  j["q"] = s.q;
  if (s.beta) j["beta"] = *s.beta;
  j["output"] = {{"dir", s.output.dir}, {"svg", s.output.svg}};
  return j;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write scenario file '" + path + "'");
  out << scenario_to_json(s).dump(2) << '\n';
}

NormedSpace build_space(const Scenario& s) { return NormedSpace(s.dim, s.p, s.weights); }

ProjectorFamily build_family(const Scenario& s) {
  const NormedSpace space = build_space(s);
  std::vector<Projector> projs;
  for (std::size_t j = 0; j < s.projectors.size(); ++j) {
    const auto& spec = s.projectors[j];
    try {
      const SubspaceBasis range(s.dim, spec.range);
      projs.push_back(spec.kernel
                          ? make_oblique_projector(range, SubspaceBasis(s.dim, *spec.kernel), space)
                          : make_orthogonal_projector(range, space));
    } catch (const RankError& e) {
      throw ValidationError("projectors[" + std::to_string(j) + "]", e.what());
    } catch (const ComplementError& e) {
      throw ValidationError("projectors[" + std::to_string(j) + "]", e.what());
    }
  }
  ProjectorFamily family(space, std::move(projs));
  std::map<std::pair<std::size_t, std::size_t>, SubspaceBasis> kernels;
  for (const auto& p : s.pair_projectors) kernels.emplace(std::pair(p.first, p.second), SubspaceBasis(s.dim, p.kernel));
  family.build_pairs(kernels);
  family.set_alphas(WeightVector(s.alphas));
  return family;
}

std::optional<SubspaceBasis> global_kernel_basis(const Scenario& s) {
  if (!s.global_kernel) return std::nullopt;
  return SubspaceBasis(s.dim, *s.global_kernel);
}

}  // namespace projlab
