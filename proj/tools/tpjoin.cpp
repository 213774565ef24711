// tpjoin command-line front end.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tpjoin/tpjoin.hpp"

namespace {

using namespace tpjoin;

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kUsage = 2;

struct Inputs {
  std::string left;
  std::string right;
  std::string theta = "true";
  std::string out;
};

void add_inputs(CLI::App* cmd, Inputs& in, bool need_theta) {
  cmd->add_option("--left", in.left, "left relation TSV")->required();
  cmd->add_option("--right", in.right, "right relation TSV")->required();
  auto* th = cmd->add_option("--theta", in.theta, "join predicate, e.g. \"l.Loc = r.Loc\"");
  if (need_theta) th->capture_default_str();
  cmd->add_option("--out", in.out, "output path (default: stdout)");
}

/// Opens --out or falls back to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ParseError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_counters(const Counters& c) {
  std::cerr << "join_execs=" << c.join_execs << " xrecords=" << c.xrecords << " windows=" << c.windows_emitted;
  for (const auto& [name, d] : c.stages) {
    std::cerr << ' ' << name << "_ms=" << std::chrono::duration<double, std::milli>(d).count();
  }
  std::cerr << '\n';
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_join(const Inputs& in, const std::string& op_text, const std::string& engine_text) {
  JoinOp op = parse_join_op(op_text);
  auto engine = bench::parse_engine(engine_text);
  auto r = load_relation(in.left);
  auto s = load_relation(in.right);
  auto th = parse_theta(in.theta, r.schema(), s.schema());
  Counters counters;
  auto rows = bench::run_engine(engine, r, s, th, op, &counters);
  Sink sink(in.out);
  write_output(sink.stream(), r.schema(), s.schema(), op, rows);
  std::cerr << rows.size() << " tuples\n";
  print_counters(counters);
  return kOk;
}

int cmd_windows(const Inputs& in, const std::string& set) {
  auto r = load_relation(in.left);
  auto s = load_relation(in.right);
  auto th = parse_theta(in.theta, r.schema(), s.schema());
  auto sets = window_sets(r, s, th);
  std::vector<Window> out;
  auto take = [&](const std::vector<Window>& ws) { out.insert(out.end(), ws.begin(), ws.end()); };
  if (set == "unmatched" || set == "all") take(sets.unmatched);
  if (set == "overlapping" || set == "all") take(sets.overlapping);
  if (set == "negating" || set == "all") take(sets.negating);
  std::stable_sort(out.begin(), out.end(), [](const Window& a, const Window& b) {
    if (a.f_r != b.f_r) return a.f_r < b.f_r;
    return a.t < b.t;
  });
  Sink sink(in.out);
  write_windows(sink.stream(), out);
  std::cerr << out.size() << " windows\n";
  return kOk;
}

int cmd_validate(const std::vector<std::string>& paths) {
  int rc = kOk;
  for (const auto& path : paths) {
    try {
      auto rel = load_relation(path);
      std::cout << path << ": ok, " << rel.size() << " tuples\n";
    } catch (const ValidationError& e) {
      std::cout << path << ": " << e.what() << '\n';
      rc = std::max(rc, kMismatch);
    }
  }
  return rc;
}

int cmd_gen(const std::string& base, std::size_t size, std::uint64_t seed, const std::string& prefix,
            const std::string& out) {
  TPRelation rel;
  if (!base.empty()) {
    rel = generate_shifted(load_relation(base), seed, prefix);
  } else if (size > 0) {
    rel = generate_version_history(size, seed, prefix);
  } else {
    throw ParseError("gen: one of --base or --size is required");
  }
  Sink sink(out);
  write_relation(sink.stream(), rel);
  return kOk;
}

int cmd_fuzz(std::size_t instances, std::uint64_t seed) {
  auto rep = fuzz::run(instances, seed);
  std::cerr << rep.instances << " instances, " << rep.failures << " failures\n";
  if (rep.failures == 0) return kOk;
  std::cerr << rep.first_failure;
  return kMismatch;
}

int cmd_bench(const std::string& sizes, const std::string& ops, const std::string& engines, std::uint64_t seed,
              const std::string& report) {
  std::vector<std::size_t> ns;
  for (const auto& s : split_csv(sizes)) {
    auto v = tpjoin::detail::parse_int(s);
    if (!v || *v <= 0) throw ParseError("bench: bad size '" + s + "'");
    ns.push_back(static_cast<std::size_t>(*v));
  }
  std::vector<JoinOp> op_list;
  for (const auto& o : split_csv(ops)) op_list.push_back(parse_join_op(o));
  std::vector<bench::Engine> engine_list;
  for (const auto& e : split_csv(engines)) engine_list.push_back(bench::parse_engine(e));

  Sink sink(report);
  for (std::size_t n : ns) {
    auto data = bench::make_dataset(n, seed);
    for (JoinOp op : op_list) {
      for (auto e : engine_list) {
        auto run = bench::measure(e, op, data);
        sink.stream() << bench::to_json(run).dump() << '\n';
        std::cerr << bench::to_string(e) << ' ' << to_string(op) << " n=" << n << " wall_ms=" << run.wall_ms
                  << " join_execs=" << run.counters.join_execs << '\n';
      }
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal-probabilistic outer and anti joins"};
  app.require_subcommand(1);

  Inputs join_in;
  std::string op = "left";
  std::string engine = "nj";
  auto* join = app.add_subcommand("join", "run a TP join");
  add_inputs(join, join_in, true);
  join->add_option("--op", op, "anti|left|right|full")->capture_default_str();
  join->add_option("--engine", engine, "nj|ta|oracle")->capture_default_str();

  Inputs win_in;
  std::string set = "all";
  auto* windows = app.add_subcommand("windows", "dump lineage-aware windows");
  add_inputs(windows, win_in, true);
  windows->add_option("--set", set, "unmatched|overlapping|negating|all")
      ->check(CLI::IsMember({"unmatched", "overlapping", "negating", "all"}))
      ->capture_default_str();

  std::vector<std::string> validate_paths;
  auto* validate = app.add_subcommand("validate", "check relation files");
  validate->add_option("paths", validate_paths, "relation TSV files")->required();

  std::string gen_base, gen_prefix = "g", gen_out;
  std::uint64_t gen_seed = 1;
  std::size_t gen_size = 0;
  auto* gen = app.add_subcommand("gen", "generate a shifted or synthetic relation");
  gen->add_option("--base", gen_base, "relation whose intervals are shifted");
  gen->add_option("--size", gen_size, "synthetic version-history size when no base is given");
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--prefix", gen_prefix, "variable prefix")->capture_default_str();
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  std::size_t fuzz_instances = 1000;
  std::uint64_t fuzz_seed = 7;
  auto* fuzz = app.add_subcommand("fuzz", "differential test against the oracle and the baseline");
  fuzz->add_option("--instances", fuzz_instances)->capture_default_str();
  fuzz->add_option("--seed", fuzz_seed)->capture_default_str();

  std::string bench_sizes = "1000,2000,5000", bench_ops = "left,anti", bench_engines = "nj,ta", bench_report;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "time engines on synthetic data");
  bench->add_option("--sizes", bench_sizes)->capture_default_str();
  bench->add_option("--ops", bench_ops)->capture_default_str();
  bench->add_option("--engines", bench_engines)->capture_default_str();
  bench->add_option("--seed", bench_seed)->capture_default_str();
  bench->add_option("--report", bench_report, "JSON-lines report path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*join) return cmd_join(join_in, op, engine);
    if (*windows) return cmd_windows(win_in, set);
    if (*validate) return cmd_validate(validate_paths);
    if (*gen) return cmd_gen(gen_base, gen_size, gen_seed, gen_prefix, gen_out);
    if (*fuzz) return cmd_fuzz(fuzz_instances, fuzz_seed);
    if (*bench) return cmd_bench(bench_sizes, bench_ops, bench_engines, bench_seed, bench_report);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMismatch;
  }
  return kUsage;
}
