// SPDX-License-Identifier: Apache-2.0
#include "projlab/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>
#include <vector>

#include "projlab/angle.hpp"
#include "projlab/criteria.hpp"
#include "projlab/engine.hpp"
#include "projlab/error.hpp"
#include "projlab/report.hpp"

namespace projlab {
namespace {

namespace fs = std::filesystem;

fs::path output_dir(const Scenario& s, const CommandOptions& opts) {
  fs::path dir = opts.out_dir.value_or(s.output.dir);
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  return f;
}

// Tries the weak consistency certificate; failure is recorded, not thrown.
void certify(ProjectorFamily& family, const Scenario& s, std::ostream& out) {
  try {
    family.set_consistency(check_weak_consistency(family, global_kernel_basis(s)));
  } catch (const CompatibilityError& e) {
    out << "weak consistency: not certified (" << e.what() << ")\n";
  }
}

CriteriaRequest make_request(const Scenario& s, std::vector<std::string> names) {
  CriteriaRequest req;
  req.names = std::move(names);
  req.q = s.q;
  req.beta = s.beta;
  req.lambda = s.lambda;
  if (s.schedule.kind == ScheduleKind::quasi_periodic) req.m = s.schedule.m;
  req.mu = s.schedule.kind == ScheduleKind::random ? s.schedule.mu
                                                   : WeightVector::uniform(s.projectors.size()).values();
  return req;
}

struct RunResult {
  std::uint64_t seed = 0;
  IterationTrace trace;
};

const char* criterion_for(ScheduleKind kind) {
  return kind == ScheduleKind::averaged ? "averaged" : to_string(kind);
}

}  // namespace

int cmd_angles(const Scenario& s, const CommandOptions& opts, std::ostream& out) {
  const ProjectorFamily family = build_family(s);
  const AngleTable table = angle_table(family);
  std::optional<AngleTable> friedrichs;
  const bool orthogonal = std::all_of(family.projectors().begin(), family.projectors().end(),
                                      [](const Projector& p) { return p.symmetric(); });
  if (family.space().hilbert() && orthogonal) {
    friedrichs.emplace(family.size());
    for (std::size_t a = 0; a < family.size(); ++a)
      for (std::size_t b = a + 1; b < family.size(); ++b) {
        const double c = friedrichs_cos(family[a].range(), family[b].range(), family.space());
        friedrichs->set(a, b, {c, c, true});
      }
  }
  const fs::path dir = output_dir(s, opts);
  auto f = open_output(dir / "angles.csv");
  write_angles_csv(f, table, friedrichs);
  out << "pairs: " << family.size() * (family.size() - 1) / 2
      << ", max cos (upper): " << format_double(table.max_upper()) << '\n'
      << "wrote " << (dir / "angles.csv").string() << '\n';
  return kExitPass;
}

int cmd_criteria(const Scenario& s, const CommandOptions& opts, std::ostream& out) {
  ProjectorFamily family = build_family(s);
  certify(family, s, out);
  const CriteriaReport rep = evaluate_criteria(family, make_request(s, s.criteria));
  const fs::path dir = output_dir(s, opts);
  {
    auto f = open_output(dir / "criteria.json");
    f << criteria_to_json(rep).dump(2) << '\n';
  }
  {
    auto f = open_output(dir / "criteria.csv");
    write_criteria_csv(f, rep);
  }
  out << "beta: " << format_double(rep.beta) << ", max cos: " << format_double(rep.max_cos) << '\n';
  for (const auto& h : rep.hypotheses)
    out << h.name << ": " << (h.pass ? "pass" : "fail") << " (" << h.reason << ")\n";
  return rep.all_pass() ? kExitPass : kExitCriteriaFail;
}

int cmd_run(const Scenario& s, const CommandOptions& opts, std::ostream& out) {
  ProjectorFamily family = build_family(s);
  const ScheduleKind kind = s.schedule.kind;
  if (kind == ScheduleKind::averaged) {
    certify(family, s, out);
  } else {
    // Product theorems all assume weak consistency; without it the run has no
    // well-defined reference limit.
    family.set_consistency(check_weak_consistency(family, global_kernel_basis(s)));
  }
  const CriteriaReport rep = evaluate_criteria(family, make_request(s, {criterion_for(kind)}));
  const HypothesisResult* row = rep.find(criterion_for(kind));
  const bool certified = row && row->pass;
  const std::size_t n = family.size();
  const double beta = rep.beta;

  Envelope envelope;
  std::optional<double> lambda;
  if (certified && n > 1) {
    switch (kind) {
      case ScheduleKind::averaged: {
        const double C = rep.averaged->C, r = rep.averaged->r;
        envelope = [C, r](std::size_t i) -> std::optional<double> {
          return C * std::pow(r, static_cast<double>(i));
        };
        break;
      }
      case ScheduleKind::cyclic: {
        const double q = s.q;
        // After k full sweeps and a partial sweep of length t the deviation
        // is at most beta^t q^k.
        envelope = [beta, q, n](std::size_t i) -> std::optional<double> {
          if (i < n) return std::nullopt;
          return std::pow(beta, static_cast<double>(i % n)) * cyclic_envelope(q, i / n);
        };
        break;
      }
      case ScheduleKind::quasi_periodic: {
        const double q = s.q;
        const std::size_t m = s.schedule.m;
        envelope = [beta, q, m](std::size_t i) -> std::optional<double> {
          if (i < m) return std::nullopt;
          return quasi_periodic_envelope(beta, q, m, i);
        };
        break;
      }
      case ScheduleKind::random: {
        const RandomParams params = *rep.random;
        lambda = params.lambda;
        const Matrix id = Matrix::identity(family.space().dim());
        const double norm_res =
            operator_norm_upper(id - family.consistency()->global_op, family.space());
        envelope = [beta, params, n, norm_res](std::size_t i) -> std::optional<double> {
          return random_envelope(beta, params.q, n, params.lambda, norm_res, i);
        };
        break;
      }
    }
  }

  auto run_one = [&](std::optional<std::uint64_t> seed) {
    if (kind == ScheduleKind::averaged) {
      const WeightVector alphas = family.alphas_or_uniform();
      const LimitMode mode = family.consistency() ? LimitMode::certified_limit : LimitMode::estimate_limit;
      return run_averaged(family, alphas, s.schedule.steps, mode, envelope);
    }
    ScheduleSpec spec = s.schedule;
    if (seed) spec.seed = seed;
    return run_product(family, make_schedule(spec, n), envelope, lambda);
  };

  // Seed list: the scenario seed first, then the sweep in ascending order.
  std::vector<std::uint64_t> sweep = s.seeds;
  std::sort(sweep.begin(), sweep.end());
  sweep.erase(std::unique(sweep.begin(), sweep.end()), sweep.end());
  const bool seeded = kind == ScheduleKind::random ||
                      (kind == ScheduleKind::quasi_periodic && s.schedule.tau.empty());
  if (!seeded) sweep.clear();

  const IterationTrace trace = run_one(s.schedule.seed);
  std::vector<RunResult> results(sweep.size());
  if (!sweep.empty()) {
    std::vector<std::exception_ptr> errors(sweep.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k; (k = next++) < sweep.size();) {
        try {
          results[k] = {sweep[k], run_one(sweep[k])};
        } catch (...) {
          errors[k] = std::current_exception();
        }
      }
    };
    const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, sweep.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  const fs::path dir = output_dir(s, opts);
  {
    auto f = open_output(dir / "trace.csv");
    write_trace_csv(f, trace);
  }
  if (opts.svg || s.output.svg) {
    auto f = open_output(dir / "trace.svg");
    write_trace_svg(f, trace, std::string(to_string(kind)) + " product: deviation vs envelope");
  }
  std::size_t violations = trace.violations();
  if (!results.empty()) {
    auto f = open_output(dir / "sweep.csv");
    f << "seed,final_deviation,violations,k_tau\n";
    for (const auto& r : results) {
      f << r.seed << ',' << format_double(r.trace.final_deviation()) << ','
        << r.trace.violations() << ',';
      if (r.trace.k_tau) f << *r.trace.k_tau;
      f << '\n';
      auto tf = open_output(dir / ("trace_" + std::to_string(r.seed) + ".csv"));
      write_trace_csv(tf, r.trace);
      violations += r.trace.violations();
    }
  }

  out << "schedule: " << to_string(kind) << ", steps: " << s.schedule.steps << '\n';
  if (certified && envelope)
    out << "envelope: " << row->name << " hypothesis holds\n";
  else if (row)
    out << "envelope: none (" << row->name << ": " << row->reason << ")\n";
  out << "final deviation: " << format_double(trace.final_deviation()) << '\n'
      << "violations: " << trace.violations() << '\n';
  if (kind == ScheduleKind::random)
    out << "k_tau: " << (trace.k_tau ? std::to_string(*trace.k_tau) : std::string("not reached")) << '\n';
  if (!results.empty()) out << "sweep: " << results.size() << " seeds, total violations " << violations << '\n';
  return violations == 0 ? kExitPass : kExitCriteriaFail;
}

int cmd_validate(const Scenario& s, std::ostream& out) {
  ProjectorFamily family = build_family(s);
  if (s.schedule.kind != ScheduleKind::averaged) (void)make_schedule(s.schedule, family.size());
  out << "scenario ok: dim " << s.dim << ", " << family.size() << " projectors, schedule "
      << to_string(s.schedule.kind) << '\n';
  return kExitPass;
}

int run_command(const std::string& command, const std::string& scenario_path,
                const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const Scenario s = load_scenario(scenario_path);
    if (command == "angles") return cmd_angles(s, opts, out);
    if (command == "criteria") return cmd_criteria(s, opts, out);
    if (command == "run") return cmd_run(s, opts, out);
    if (command == "validate") return cmd_validate(s, out);
    err << "error: unknown command '" << command << "'\n";
    return kExitRuntimeError;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const CompatibilityError& e) {
    err << "compatibility failure: " << e.what() << '\n';
    return kExitCriteriaFail;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace projlab
