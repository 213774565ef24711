#pragma once

// Benchmark runner: synthetic version-history data joined on an equality
// predicate, timed per engine and operator, reported as JSON lines.

#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tpjoin/baseline_ta.hpp"
#include "tpjoin/error.hpp"
#include "tpjoin/instrument.hpp"
#include "tpjoin/joins.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/oracle.hpp"
#include "tpjoin/theta.hpp"

namespace tpjoin::bench {

inline constexpr int kSchemaVersion = 1;

enum class Engine { NJ, TA, Oracle };

inline Engine parse_engine(std::string_view s) {
  if (s == "nj") return Engine::NJ;
  if (s == "ta") return Engine::TA;
  if (s == "oracle") return Engine::Oracle;
  throw ParseError("unknown engine '" + std::string(s) + "' (expected nj|ta|oracle)");
}

inline const char* to_string(Engine e) {
  switch (e) {
    case Engine::NJ:
      return "nj";
    case Engine::TA:
      return "ta";
    case Engine::Oracle:
      return "oracle";
  }
  return "?";
}

inline std::vector<OutputTuple> run_engine(Engine e, const TPRelation& r, const TPRelation& s, const Theta& th,
                                           JoinOp op, Counters* counters) {
  switch (e) {
    case Engine::NJ:
      return negation_join(r, s, th, op, counters);
    case Engine::TA:
      return ta::ta_join(r, s, th, op, counters);
    case Engine::Oracle:
      break;
  }
  return oracle::snapshot_join(r, s, th, op);
}

struct Dataset {
  TPRelation left;
  TPRelation right;
  Theta theta;
};

/// Version-history relation of n tuples and a shifted copy of it.
inline Dataset make_dataset(std::size_t n, std::uint64_t seed) {
  Dataset d;
  d.left = generate_version_history(n, seed, "r");
  d.right = generate_shifted(d.left, seed + 1, "s");
  d.theta = parse_theta("l.File_Path = r.File_Path", d.left.schema(), d.right.schema());
  return d;
}

struct Run {
  Engine engine = Engine::NJ;
  JoinOp op = JoinOp::LeftOuter;
  std::size_t size = 0;
  double wall_ms = 0;
  std::size_t output_tuples = 0;
  Counters counters;
};

/// Times one operator call; data generation and IO stay outside the clock.
inline Run measure(Engine e, JoinOp op, const Dataset& d) {
  Run run;
  run.engine = e;
  run.op = op;
  run.size = d.left.size();
  auto t0 = std::chrono::steady_clock::now();
  auto rows = run_engine(e, d.left, d.right, d.theta, op, &run.counters);
  auto t1 = std::chrono::steady_clock::now();
  run.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  run.output_tuples = rows.size();
  return run;
}

inline nlohmann::json to_json(const Run& run) {
  using ms = std::chrono::duration<double, std::milli>;
  nlohmann::json stages = nlohmann::json::object();
  nlohmann::json fractions = nlohmann::json::object();
  std::string largest;
  double largest_ms = -1;
  for (const auto& [name, d] : run.counters.stages) {
    double v = ms(d).count();
    stages[name] = v;
    fractions[name] = run.wall_ms > 0 ? v / run.wall_ms : 0.0;
    if (v > largest_ms) {
      largest_ms = v;
      largest = name;
    }
  }
  return {
      {"schema_version", kSchemaVersion},
      {"engine", to_string(run.engine)},
      {"op", tpjoin::to_string(run.op)},
      {"size", run.size},
      {"wall_ms", run.wall_ms},
      {"join_execs", run.counters.join_execs},
      {"xrecords", run.counters.xrecords},
      {"windows_emitted", run.counters.windows_emitted},
      {"output_tuples", run.output_tuples},
      {"stages", stages},
      {"stage_fractions", fractions},
      {"largest_stage", largest},
      {"clj_fraction", run.wall_ms > 0 ? ms(run.counters.join_time).count() / run.wall_ms : 0.0},
  };
}

}  // namespace tpjoin::bench
