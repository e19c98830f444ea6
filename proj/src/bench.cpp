#include "sigcore/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "sigcore/parallel.hpp"
#include "sigcore/sigkernel.hpp"
#include "sigcore/sigkernel_grad.hpp"
#include "sigcore/signature.hpp"
#include "sigcore/signature_grad.hpp"

namespace sigcore {

namespace {

// Random walks with N(0, 1/L) steps, so total variation stays O(sqrt(d)).
template <class T>
std::vector<T> random_walks(const BenchShape& s, std::mt19937_64& rng) {
  std::normal_distribution<double> step(0.0, 1.0 / std::sqrt(static_cast<double>(s.length)));
  std::vector<T> data(s.batch * s.length * s.dim);
  for (std::size_t b = 0; b < s.batch; ++b) {
    for (std::size_t i = 1; i < s.length; ++i) {
      for (std::size_t c = 0; c < s.dim; ++c) {
        const std::size_t at = (b * s.length + i) * s.dim + c;
        data[at] = data[at - s.dim] + static_cast<T>(step(rng));
      }
    }
  }
  return data;
}

template <class T>
BenchReport run(BenchTask task, const BenchShape& s, std::size_t reps, unsigned threads,
                std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<T> x = random_walks<T>(s, rng);
  const PathBatch<T> bx = make_batch<T>(x, s.batch, s.length, s.dim);

  if (task == BenchTask::signature_fwd || task == BenchTask::signature_bwd) {
    SigOptions opts;
    opts.depth = s.depth;
    opts.threads = threads;
    const std::size_t total = signature_shape(s.dim, opts).total();
    std::vector<T> out(s.batch * total);
    if (task == BenchTask::signature_fwd) {
      return time_runs([&] { signature_into<T>(bx, opts, out); }, reps);
    }
    std::vector<T> cot(out.size(), T(1));
    return time_runs([&] { signature_backward<T>(bx, opts, cot); }, reps);
  }

  const std::vector<T> y = random_walks<T>(s, rng);
  const PathBatch<T> by = make_batch<T>(y, s.batch, s.length, s.dim);
  KernelConfig cfg;
  cfg.dyadic_x = s.dyadic;
  cfg.dyadic_y = s.dyadic;
  cfg.threads = threads;
  if (task == BenchTask::kernel_fwd) {
    return time_runs([&] { kernel_batch<T>(bx, by, cfg); }, reps);
  }
  std::vector<T> cot(s.batch, T(1));
  return time_runs([&] { kernel_batch_backward<T>(bx, by, cfg, cot); }, reps);
}

} // namespace

std::optional<BenchTask> parse_bench_task(std::string_view name) {
  if (name == "signature-fwd" || name == "signature") return BenchTask::signature_fwd;
  if (name == "signature-bwd") return BenchTask::signature_bwd;
  if (name == "kernel-fwd" || name == "kernel") return BenchTask::kernel_fwd;
  if (name == "kernel-bwd") return BenchTask::kernel_bwd;
  return std::nullopt;
}

std::string_view task_name(BenchTask task) {
  switch (task) {
  case BenchTask::signature_fwd: return "signature-fwd";
  case BenchTask::signature_bwd: return "signature-bwd";
  case BenchTask::kernel_fwd: return "kernel-fwd";
  case BenchTask::kernel_bwd: return "kernel-bwd";
  }
  return "";
}

BenchReport time_runs(const std::function<void()>& fn, std::size_t reps) {
  if (reps == 0) throw std::invalid_argument("bench: need at least one repetition");
  using clock = std::chrono::steady_clock;
  fn();
  BenchReport report;
  report.repetitions = reps;
  report.times.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto start = clock::now();
    fn();
    report.times.push_back(std::chrono::duration<double>(clock::now() - start).count());
  }
  report.minimum = *std::min_element(report.times.begin(), report.times.end());
  return report;
}

BenchReport bench(BenchTask task, const BenchShape& shape, std::size_t reps, unsigned threads,
                  unsigned scalar_bits, std::uint64_t seed) {
  if (shape.batch == 0 || shape.length < 2 || shape.dim == 0) {
    throw std::invalid_argument("bench: need batch >= 1, length >= 2 and dim >= 1");
  }
  const unsigned resolved = resolve_threads(threads);
  BenchReport report;
  if (scalar_bits == 64) {
    report = run<double>(task, shape, reps, resolved, seed);
  } else if (scalar_bits == 32) {
    report = run<float>(task, shape, reps, resolved, seed);
  } else {
    throw std::invalid_argument("bench: scalar width must be 32 or 64");
  }
  report.task = task_name(task);
  report.shape = shape;
  report.threads = resolved;
  report.scalar_bits = scalar_bits;
  return report;
}

nlohmann::json to_json(const BenchReport& r) {
  nlohmann::json shape = {{"batch", r.shape.batch}, {"length", r.shape.length}, {"dim", r.shape.dim}};
  if (r.task.rfind("signature", 0) == 0) {
    shape["depth"] = r.shape.depth;
  } else {
    shape["dyadic"] = r.shape.dyadic;
  }
  return {{"task", r.task},
          {"shape", shape},
          {"repetitions", r.repetitions},
          {"times", r.times},
          {"minimum", r.minimum},
          {"threads", r.threads},
          {"scalar_bits", r.scalar_bits}};
}

} // namespace sigcore
