#include "sigcore/cli.hpp"

#include <charconv>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "sigcore/array_io.hpp"
#include "sigcore/bench.hpp"
#include "sigcore/sigkernel.hpp"
#include "sigcore/signature.hpp"
#include "sigcore/transforms.hpp"

namespace sigcore {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string input;
  std::string input2;
  std::string output;
  unsigned threads = 0;
  std::string dtype = "f64";
};

struct Settings {
  Common common;
  std::size_t depth = 0;
  std::string method = "horner";
  bool time_aug = false;
  bool lead_lag = false;
  unsigned dyadic_x = 0;
  unsigned dyadic_y = 0;
  std::size_t strip_width = 32;
  std::string kind = "time-aug";
  std::string task = "signature-fwd";
  std::size_t reps = 50;
  bool json = false;
  BenchShape shape;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c, bool needs_input) {
  auto* in = cmd->add_option("--input", c.input, "input array (.sgt or .csv)");
  if (needs_input) in->required();
  cmd->add_option("--input2", c.input2, "second input array");
  cmd->add_option("--output", c.output, "write the result as an SGT1 file");
  cmd->add_option("--threads", c.threads, "worker threads (0: SIGCORE_THREADS or all cores)");
  cmd->add_option("--dtype", c.dtype, "scalar type")->check(CLI::IsMember({"f32", "f64"}));
}

template <class T>
std::string format(T v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  if (s.find_first_of(".einf") == std::string::npos) s += ".0";
  return s;
}

template <class T>
struct Loaded {
  Array<T> array;
  BatchShape shape;
  bool single = true;

  PathBatch<T> view() const { return {array.values, shape}; }
};

template <class T>
Loaded<T> load(const std::string& path) {
  Loaded<T> l{convert_array<T>(read_array(path)), {}, true};
  const auto& d = l.array.dims;
  if (d.size() == 1) {
    l.shape = {1, d[0], 1};
  } else if (d.size() == 2) {
    l.shape = {1, d[0], d[1]};
  } else {
    l.shape = {d[0], d[1], d[2]};
    l.single = false;
  }
  return l;
}

template <class T>
void emit(const Settings& s, std::ostream& out, Array<T> result, std::size_t row) {
  if (!s.common.output.empty()) {
    write_array(result, s.common.output);
    return;
  }
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    out << format(result.values[i]);
    out << ((i + 1) % row == 0 ? '\n' : ' ');
  }
}

template <class T>
void signature_cmd(const Settings& s, std::ostream& out) {
  const auto in = load<T>(s.common.input);
  SigOptions opts;
  opts.depth = s.depth;
  opts.method = s.method == "direct" ? SigMethod::direct : SigMethod::horner;
  opts.transform = s.time_aug ? Transform::time_augment
                   : s.lead_lag ? Transform::lead_lag
                                : Transform::none;
  opts.threads = s.common.threads;
  const std::size_t total = signature_shape(in.shape.dim, opts).total();
  Array<T> result;
  result.values = signature<T>(in.view(), opts);
  result.dims = in.single ? std::vector<std::uint64_t>{total}
                          : std::vector<std::uint64_t>{in.shape.batch, total};
  emit(s, out, std::move(result), total);
}

KernelConfig kernel_config(const Settings& s) {
  KernelConfig cfg;
  cfg.dyadic_x = s.dyadic_x;
  cfg.dyadic_y = s.dyadic_y;
  cfg.strip_width = s.strip_width;
  cfg.threads = s.common.threads;
  return cfg;
}

template <class T>
void kernel_cmd(const Settings& s, std::ostream& out) {
  if (s.common.input2.empty()) throw UsageError("kernel: --input2 is required");
  const auto x = load<T>(s.common.input);
  const auto y = load<T>(s.common.input2);
  Array<T> result;
  result.values = kernel_batch<T>(x.view(), y.view(), kernel_config(s));
  result.dims = {result.values.size()};
  emit(s, out, std::move(result), 1);
}

template <class T>
void gram_cmd(const Settings& s, std::ostream& out) {
  const auto x = load<T>(s.common.input);
  Array<T> result;
  std::size_t cols = x.shape.batch;
  if (s.common.input2.empty()) {
    result.values = kernel_gram<T>(x.view(), kernel_config(s));
  } else {
    const auto y = load<T>(s.common.input2);
    cols = y.shape.batch;
    result.values = kernel_gram<T>(x.view(), y.view(), kernel_config(s));
  }
  result.dims = {x.shape.batch, cols};
  emit(s, out, std::move(result), cols);
}

template <class T>
void transform_cmd(const Settings& s, std::ostream& out) {
  const auto in = load<T>(s.common.input);
  const Transform kind = s.kind == "lead-lag" ? Transform::lead_lag
                         : s.kind == "time-aug" ? Transform::time_augment
                                                : Transform::none;
  validate(in.view(), 1, "transform");
  PathArray<T> t = transform<T>(in.view(), kind);
  Array<T> result;
  result.values = std::move(t.data);
  if (in.single) {
    result.dims = {t.shape.length, t.shape.dim};
  } else {
    result.dims = {t.shape.batch, t.shape.length, t.shape.dim};
  }
  emit(s, out, std::move(result), t.shape.dim);
}

void bench_cmd(const Settings& s, std::ostream& out) {
  const auto task = parse_bench_task(s.task);
  if (!task) throw UsageError("bench: unknown task '" + s.task + "'");
  const unsigned bits = s.common.dtype == "f32" ? 32 : 64;
  const BenchReport r = bench(*task, s.shape, s.reps, s.common.threads, bits, s.seed);
  if (s.json) {
    out << to_json(r).dump(2) << '\n';
  } else {
    out << r.task << " B=" << r.shape.batch << " L=" << r.shape.length << " d=" << r.shape.dim
        << " threads=" << r.threads << " reps=" << r.repetitions << " min=" << r.minimum
        << "s\n";
  }
}

template <class T>
void dispatch(const std::string& name, const Settings& s, std::ostream& out) {
  if (name == "signature") signature_cmd<T>(s, out);
  else if (name == "kernel") kernel_cmd<T>(s, out);
  else if (name == "gram") gram_cmd<T>(s, out);
  else if (name == "transform") transform_cmd<T>(s, out);
  else bench_cmd(s, out);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Path signatures and signature kernels", "sigcore"};
  app.require_subcommand(1);
  Settings s;

  auto* sig = app.add_subcommand("signature", "truncated signatures of each path");
  add_common(sig, s.common, true);
  sig->add_option("--depth", s.depth, "truncation depth")->required()->check(CLI::PositiveNumber);
  sig->add_option("--method", s.method)->check(CLI::IsMember({"direct", "horner"}));
  auto* ta = sig->add_flag("--time-aug", s.time_aug, "append the time coordinate");
  auto* ll = sig->add_flag("--lead-lag", s.lead_lag, "lead-lag transform");
  ta->excludes(ll);

  auto* ker = app.add_subcommand("kernel", "signature kernel of paired paths");
  auto* gram = app.add_subcommand("gram", "signature kernel Gram matrix");
  for (auto* cmd : {ker, gram}) {
    add_common(cmd, s.common, true);
    cmd->add_option("--dyadic-x", s.dyadic_x, "refinement order of the first path");
    cmd->add_option("--dyadic-y", s.dyadic_y, "refinement order of the second path");
    cmd->add_option("--strip-width", s.strip_width)->check(CLI::PositiveNumber);
  }

  auto* tr = app.add_subcommand("transform", "materialise a path transform");
  add_common(tr, s.common, true);
  tr->add_option("--kind", s.kind)->check(CLI::IsMember({"none", "time-aug", "lead-lag"}));

  auto* bn = app.add_subcommand("bench", "time library calls on random paths");
  add_common(bn, s.common, false);
  bn->add_option("--task", s.task, "signature-fwd, signature-bwd, kernel-fwd or kernel-bwd");
  bn->add_option("--reps", s.reps)->check(CLI::PositiveNumber);
  bn->add_flag("--json", s.json, "print the report as JSON");
  bn->add_option("--batch", s.shape.batch)->check(CLI::PositiveNumber);
  bn->add_option("--length", s.shape.length)->check(CLI::Range(2ul, 1ul << 30));
  bn->add_option("--dim", s.shape.dim)->check(CLI::PositiveNumber);
  bn->add_option("--depth", s.shape.depth)->check(CLI::PositiveNumber);
  bn->add_option("--dyadic", s.shape.dyadic);
  bn->add_option("--seed", s.seed);

  std::vector<char*> argv;
  std::vector<std::string> storage(args);
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (s.common.dtype == "f32") {
      dispatch<float>(name, s, out);
    } else {
      dispatch<double>(name, s, out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run_cli(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

} // namespace sigcore
