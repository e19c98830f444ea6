#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace sigcore {

enum class BenchTask { signature_fwd, signature_bwd, kernel_fwd, kernel_bwd };

// Accepts the canonical names plus "signature" and "kernel" for the forward tasks.
std::optional<BenchTask> parse_bench_task(std::string_view name);
std::string_view task_name(BenchTask task);

struct BenchShape {
  std::size_t batch = 32;
  std::size_t length = 128;
  std::size_t dim = 4;
  std::size_t depth = 4; // signature tasks
  unsigned dyadic = 0;   // kernel tasks, used for both axes
};

struct BenchReport {
  std::string task;
  BenchShape shape;
  std::size_t repetitions = 0;
  std::vector<double> times; // seconds
  double minimum = 0;
  unsigned threads = 1;
  unsigned scalar_bits = 64;
};

// Calls fn once untimed, then `reps` timed calls. Fills times and minimum.
BenchReport time_runs(const std::function<void()>& fn, std::size_t reps);

// Builds random inputs outside the timed region and times the library call.
BenchReport bench(BenchTask task, const BenchShape& shape, std::size_t reps = 50,
                  unsigned threads = 0, unsigned scalar_bits = 64, std::uint64_t seed = 0);

nlohmann::json to_json(const BenchReport& report);

} // namespace sigcore
