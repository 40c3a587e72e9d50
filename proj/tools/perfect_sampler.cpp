// perfect-sampler: command-line front end for the samplers and the
// acceptance suite.
//
// Exit codes: 0 success, 1 bad parameters or model files, 2 non-coalescence,
// 3 validation failure.

#include <CLI11.hpp>

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "perfect/autogamma.hpp"
#include "perfect/autonormal.hpp"
#include "perfect/couplers.hpp"
#include "perfect/errors.hpp"
#include "perfect/io.hpp"
#include "perfect/models.hpp"
#include "perfect/replay_rng.hpp"
#include "perfect/toy_chain.hpp"
#include "perfect/validation/acceptance.hpp"

namespace {

using namespace perfect;

enum ExitCode { kOk = 0, kParameter = 1, kNoCoalescence = 2, kValidation = 3 };

class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string output;
  int jobs = 1;
  std::int64_t samples = 1;
};

/// Runs body(i) for i in [0, count) on `jobs` threads. Results are written by
/// index, so the output does not depend on the thread count. The first
/// exception (by index) is rethrown.
template <class T, class Body>
std::vector<T> replicate(std::int64_t count, int jobs, Body body) {
  std::vector<T> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<std::int64_t> next{0};
  auto worker = [&]() {
    for (std::int64_t i = next++; i < count; i = next++) {
      try {
        out[static_cast<std::size_t>(i)] = body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(std::max<std::int64_t>(count, 1))));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Sends `body` to the --output file (atomically) or to stdout.
void emit(const Common& c, const std::function<void(std::ostream&)>& body) {
  if (c.output.empty()) {
    body(std::cout);
    std::cout.flush();
  } else {
    io::atomic_write(c.output, body);
  }
}

/// Summary text goes to stdout when samples went to a file, else to stderr.
std::ostream& summary_stream(const Common& c) { return c.output.empty() ? std::cerr : std::cout; }

void write_row(std::ostream& os, const std::vector<double>& xs) {
  for (std::size_t k = 0; k < xs.size(); ++k) os << (k ? "," : "") << xs[k];
  os << '\n';
}

void write_site_header(std::ostream& os, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) os << (k ? "," : "") << 'x' << k;
  os << '\n';
}

// ---------------------------------------------------------------------------

void run_toy(const Common& c, int n, const std::string& variant) {
  std::function<int(std::uint64_t)> sampler;
  if (variant == "correct") {
    sampler = [n](std::uint64_t s) { return toy::run_toy_cftp(n, s); };
  } else if (variant == "fresh") {
    sampler = [n](std::uint64_t s) { return toy::run_fresh_coins_variant(n, s); };
  } else if (variant == "forward") {
    sampler = [n](std::uint64_t s) { return toy::run_forward_doubling_variant(n, s); };
  } else {
    sampler = [n](std::uint64_t s) { return toy::run_forward_coalescence_only(n, s); };
  }
  toy::check_n(n);
  const auto states =
      replicate<int>(c.samples, c.jobs, [&](std::int64_t i) { return sampler(derive_seed(c.seed, i)); });
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (int s : states) ++counts[static_cast<std::size_t>(s)];

  auto summary = [&](std::ostream& os) {
    os << "# summary variant=" << variant << " n=" << n << " samples=" << c.samples << " seed=" << c.seed << '\n';
    os << "state,count,frequency\n";
    for (std::size_t s = 0; s < counts.size(); ++s) {
      os << s << ',' << counts[s] << ',' << static_cast<double>(counts[s]) / static_cast<double>(c.samples)
         << '\n';
    }
  };
  emit(c, [&](std::ostream& os) {
    os << "state\n";
    for (int s : states) os << s << '\n';
    if (c.output.empty()) summary(os);
  });
  if (!c.output.empty()) summary(std::cout);
}

void run_autogamma_cmd(const Common& c, const std::string& model) {
  const auto field = models::load_field(model);
  const auto runs = replicate<autogamma::AutogammaResult>(
      c.samples, c.jobs, [&](std::int64_t i) { return autogamma::run_autogamma(field, derive_seed(c.seed, i)); });
  emit(c, [&](std::ostream& os) {
    os << std::setprecision(17);
    write_site_header(os, field.size());
    for (const auto& r : runs) write_row(os, r.heights);
  });
  double sweeps = 0.0;
  std::int64_t most = 0;
  for (const auto& r : runs) {
    sweeps += static_cast<double>(r.sweeps_to_coalesce);
    most = std::max(most, r.sweeps_to_coalesce);
  }
  summary_stream(c) << "# autogamma sites=" << field.size() << " samples=" << c.samples
                    << " mean_sweeps_to_coalesce=" << sweeps / static_cast<double>(c.samples)
                    << " max_sweeps_to_coalesce=" << most << '\n';
}

std::pair<std::size_t, std::size_t> parse_dims(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("no x");
    std::size_t used_w = 0;
    std::size_t used_h = 0;
    const auto w = std::stoul(text.substr(0, x), &used_w);
    const auto h = std::stoul(text.substr(x + 1), &used_h);
    if (used_w != x || used_h != text.size() - x - 1 || w == 0 || h == 0) throw std::invalid_argument("bad");
    return {w, h};
  } catch (const std::exception&) {
    throw ParameterError("--render expects WxH, e.g. 50x50");
  }
}

void run_autonormal_cmd(const Common& c, const std::string& model, std::optional<double> truncated,
                        const std::string& render, const std::string& image) {
  const auto graph = models::load_graph(model);
  std::optional<std::pair<std::size_t, std::size_t>> dims;
  if (!render.empty()) {
    dims = parse_dims(render);
    if (dims->first * dims->second != graph.size()) {
      throw ParameterError("--render " + render + " does not match the model's " + std::to_string(graph.size()) +
                           " sites");
    }
  }
  struct Run {
    autonormal::HeightConfig config;
    std::int64_t work = 0;
  };
  std::vector<Run> runs;
  if (truncated) {
    if (!(*truncated > 0.0)) throw ParameterError("--truncated must be positive");
    graph.validate();
    runs = replicate<Run>(c.samples, c.jobs, [&](std::int64_t i) {
      auto r = autonormal::run_truncated_cftp_diagnosed(graph, derive_seed(c.seed, i), *truncated,
                                                        {.find_t_star = false});
      return Run{std::move(r.state), r.diagnostics.t_star};
    });
  } else {
    autonormal::require_exact_sampler_graph(graph);
    const auto tree = autonormal::bfs_spanning_tree(graph);
    runs = replicate<Run>(c.samples, c.jobs, [&](std::int64_t i) {
      auto r = autonormal::run_exact_autonormal(graph, tree, derive_seed(c.seed, i));
      return Run{std::move(r.config), r.maps_used};
    });
  }
  emit(c, [&](std::ostream& os) {
    os << std::setprecision(17);
    write_site_header(os, graph.size());
    for (const auto& r : runs) write_row(os, r.config);
  });
  if (dims) autonormal::render_field(runs.front().config, dims->first, dims->second, image);

  double work = 0.0;
  for (const auto& r : runs) work += static_cast<double>(r.work);
  summary_stream(c) << "# autonormal sites=" << graph.size() << " samples=" << c.samples
                    << (truncated ? " sampler=truncated mean_start_time=" : " sampler=exact mean_maps_T=")
                    << work / static_cast<double>(c.samples) << (dims ? " image=" + image : "") << '\n';
}

void run_coupler_stats(const Common& c, const std::string& dist, double param, const std::string& interval,
                       std::int64_t maps) {
  if (!(param > 0.0)) throw ParameterError("--param must be positive");
  if (maps < 1) throw ParameterError("--maps must be at least 1");
  const bool scale = dist == "gamma";
  double a = scale ? 1.0 : 0.0;
  double b = scale ? std::exp(1.0) : 1.0;
  if (!interval.empty()) {
    const auto comma = interval.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      std::size_t ua = 0;
      std::size_t ub = 0;
      a = std::stod(interval.substr(0, comma), &ua);
      b = std::stod(interval.substr(comma + 1), &ub);
      if (ua != comma || ub != interval.size() - comma - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParameterError("--interval expects a,b");
    }
  }
  if (!(a <= b) || (scale && !(a > 0.0))) throw ParameterError("--interval needs a <= b (and a > 0 for gamma)");

  double min_width = std::numeric_limits<double>::infinity();
  double width_sum = 0.0;
  double image_sum = 0.0;
  std::int64_t image_max = 0;
  for (std::int64_t i = 0; i < maps; ++i) {
    const StreamPath p{.master_seed = c.seed, .step = i};
    double width;
    std::int64_t images;
    if (dist == "normal") {
      const auto m = normal_coupler(param, p);
      width = m.width();
      images = image_count(m, a, b);
    } else if (dist == "exp") {
      const auto m = exponential_coupler(param, p);
      width = m.width();
      images = image_count(m, a, b);
    } else {
      const auto m = gamma_scale_coupler(param, p);
      width = m.X1 + m.X2;
      images = scale_image_count(m, a, b);
    }
    min_width = std::min(min_width, width);
    width_sum += width;
    image_sum += static_cast<double>(images);
    image_max = std::max(image_max, images);
  }
  const double n = static_cast<double>(maps);
  emit(c, [&](std::ostream& os) {
    os << std::setprecision(9);
    os << "dist,param,a,b,maps,min_width,mean_width,mean_image,max_image,formula_mean_image,formula_bound\n";
    os << dist << ',' << param << ',' << a << ',' << b << ',' << maps << ',' << min_width << ',' << width_sum / n
       << ',' << image_sum / n << ',' << image_max << ',';
    if (dist == "normal") {
      os << formulas::normal_mean_image(b - a, param) << ",min_width>=" << formulas::normal_min_width(param)
         << " max_image<=" << formulas::normal_max_image(b - a, param);
    } else if (dist == "exp") {
      os << formulas::exponential_mean_image(b - a, param) << ",";
    } else {
      os << formulas::gamma_mean_image(b / a, param) << ",";
    }
    os << '\n';
  });
}

void run_validate(const Common& c) {
  const bool ok = validation::run_acceptance(c.seed, [&](const validation::CriterionResult& r) {
    std::cout << validation::format_result(r) << std::endl;
  });
  if (!ok) throw ValidationFailure("one or more acceptance criteria failed");
  std::cout << "all acceptance criteria passed" << std::endl;
}

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("PERFECT_SAMPLER_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != std::string(text).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParameterError("PERFECT_SAMPLER_SEED must be an unsigned integer");
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Exact sampling by coupling from the past"};
  app.require_subcommand(1);
  Common c;
  auto add_common = [&](CLI::App* sub, bool with_samples) {
    sub->add_option("--seed", c.seed, "Master seed (default: $PERFECT_SAMPLER_SEED, else 0)");
    sub->add_option("--output,-o", c.output, "Write the CSV here instead of stdout");
    if (with_samples) {
      sub->add_option("--samples", c.samples, "Number of independent samples")->check(CLI::PositiveNumber);
      sub->add_option("--jobs,-j", c.jobs, "Worker threads for independent samples")->check(CLI::PositiveNumber);
    }
  };

  int toy_n = 0;
  std::string variant = "correct";
  auto* toy_cmd = app.add_subcommand("toy", "Reflecting walk on {0..n}: correct CFTP or a broken variant");
  toy_cmd->add_option("--n", toy_n, "Largest state")->required();
  toy_cmd->add_option("--variant", variant, "correct | fresh | forward | coalesce-only")
      ->check(CLI::IsMember({"correct", "fresh", "forward", "coalesce-only"}));
  add_common(toy_cmd, true);

  std::string gamma_model;
  auto* ag_cmd = app.add_subcommand("autogamma", "Exact samples of an autogamma field");
  ag_cmd->add_option("--model", gamma_model, "Field file, or 'pumps'")->required();
  add_common(ag_cmd, true);

  std::string graph_model;
  std::optional<double> truncated;
  bool exact = false;
  std::string render;
  std::string image = "field.pgm";
  auto* an_cmd = app.add_subcommand("autonormal", "Samples of an autonormal (free field) model");
  an_cmd->add_option("--model", graph_model, "Graph file, or 'gridN' for an N x N unit torus")->required();
  auto* exact_flag = an_cmd->add_flag("--exact", exact, "Exact composite-map sampler (default)");
  an_cmd->add_option("--truncated", truncated, "Monotone CFTP from the box [-B, B] instead")->excludes(exact_flag);
  an_cmd->add_option("--render", render, "Also write the first sample as a WxH PGM");
  an_cmd->add_option("--image", image, "PGM path for --render")->capture_default_str();
  add_common(an_cmd, true);

  std::string dist;
  double param = 1.0;
  std::string interval;
  std::int64_t maps = 100'000;
  auto* cs_cmd = app.add_subcommand("coupler-stats", "Widths and image sizes of random coupler maps");
  cs_cmd->add_option("--dist", dist, "normal | exp | gamma")
      ->required()
      ->check(CLI::IsMember({"normal", "exp", "gamma"}));
  cs_cmd->add_option("--param", param, "sigma, mean, or shape alpha")->capture_default_str();
  cs_cmd->add_option("--interval", interval, "a,b (default 0,1; 1,e for gamma)");
  cs_cmd->add_option("--maps", maps, "Number of maps")->capture_default_str();
  add_common(cs_cmd, false);

  auto* val_cmd = app.add_subcommand("validate", "Run the acceptance suite");
  val_cmd->add_option("--seed", c.seed, "Base seed (default: $PERFECT_SAMPLER_SEED, else the shipped seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParameter;
  }

  for (auto* sub : app.get_subcommands()) {
    if (sub->count("--seed") > 0) c.seed_given = true;
  }
  if (!c.seed_given) {
    if (const auto s = env_seed()) {
      c.seed = *s;
    } else if (val_cmd->parsed()) {
      c.seed = validation::kDefaultSeed;
    }
  }

  if (toy_cmd->parsed()) run_toy(c, toy_n, variant);
  if (ag_cmd->parsed()) run_autogamma_cmd(c, gamma_model);
  if (an_cmd->parsed()) run_autonormal_cmd(c, graph_model, truncated, render, image);
  if (cs_cmd->parsed()) run_coupler_stats(c, dist, param, interval, maps);
  if (val_cmd->parsed()) run_validate(c);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const perfect::NonCoalescenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNoCoalescence;
  } catch (const ValidationFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParameter;
  }
}
