#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace tpjoin {

/// Execution counters shared by the engines. Operators increment them; callers
/// read them after the run.
struct Counters {
  std::uint64_t join_execs = 0;       // conventional overlap joins executed
  std::uint64_t xrecords = 0;         // records produced by conventional joins
  std::uint64_t windows_emitted = 0;  // windows handed to finalization
  std::chrono::nanoseconds join_time{0};
  std::vector<std::pair<std::string, std::chrono::nanoseconds>> stages;

  void add_stage(const std::string& name, std::chrono::nanoseconds d) {
    for (auto& [n, t] : stages) {
      if (n == name) {
        t += d;
        return;
      }
    }
    stages.emplace_back(name, d);
  }
};

/// Splits a run into consecutive stages: each lap() charges the time since the
/// previous lap to the named stage, so stage times sum to the total.
class StageClock {
 public:
  explicit StageClock(Counters* c) : counters_(c), last_(std::chrono::steady_clock::now()) {}

  void lap(const std::string& stage) {
    auto now = std::chrono::steady_clock::now();
    if (counters_) counters_->add_stage(stage, now - last_);
    last_ = now;
  }

 private:
  Counters* counters_;
  std::chrono::steady_clock::time_point last_;
};

}  // namespace tpjoin
