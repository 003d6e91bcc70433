#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "nighthaze/config.hpp"
#include "nighthaze/image_io.hpp"
#include "nighthaze/metrics.hpp"
#include "nighthaze/pipeline.hpp"
#include "nighthaze/report.hpp"
#include "nighthaze/synth.hpp"

namespace nighthaze::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigEnv = "NIGHTHAZE_CONFIG";

struct GlobalOptions {
  std::string config_path;
  bool dump_intermediates = false;
  std::string output;
  unsigned threads = 0;
  std::uint64_t seed = 1;
};

void add_global_options(CLI::App* cmd, GlobalOptions& g) {
  cmd->add_option("--config", g.config_path, "key = value config file (falls back to $NIGHTHAZE_CONFIG)");
  cmd->add_flag("--dump-intermediates", g.dump_intermediates, "write every intermediate map");
  cmd->add_option("-o,--output", g.output, "output path");
  cmd->add_option("--threads", g.threads, "worker threads for batch processing (0 = all cores)");
  cmd->add_option("--seed", g.seed, "seed for generated noise images");
}

std::optional<fs::path> config_source(const GlobalOptions& g) {
  if (!g.config_path.empty()) return fs::path(g.config_path);
  if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') return fs::path(env);
  return std::nullopt;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

fs::path with_suffix(const fs::path& base, const std::string& suffix, const std::string& ext) {
  fs::path p = base;
  p.replace_filename(base.stem().string() + suffix + ext);
  return p;
}

// ------------------------------------------------------------------ dehaze

struct PipelineFlags {
  std::optional<double> gamma;
  std::optional<double> gamma0;
  std::optional<double> omega;
  std::optional<int> patch_radius;
  std::optional<int> gf_radius;
  std::optional<double> gf_epsilon;
  bool no_stretch = false;
  bool unit_eta = false;
  std::vector<std::string> overrides;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--gamma", f.gamma, "illumination gamma (default 1/3)");
  cmd->add_option("--gamma0", f.gamma0, "light-color amplification exponent (default 1/1.2)");
  cmd->add_option("--omega", f.omega, "haze removal strength (default 0.95)");
  cmd->add_option("--patch-radius", f.patch_radius, "local patch radius (default 5)");
  cmd->add_option("--gf-radius", f.gf_radius, "guided filter radius (default 32)");
  cmd->add_option("--gf-epsilon", f.gf_epsilon, "guided filter regularizer (default 0.01)");
  cmd->add_flag("--no-stretch", f.no_stretch, "skip the percentile stretch");
  cmd->add_flag("--eta-one", f.unit_eta, "force the light color to white (skip color correction)");
  cmd->add_option("--set", f.overrides, "extra key=value config override (repeatable)");
}

PipelineConfig resolve_pipeline_config(const GlobalOptions& g, const PipelineFlags& f) {
  PipelineConfig cfg;
  if (const auto src = config_source(g)) apply_config_file(*src, cfg);
  if (f.gamma) cfg.gamma = *f.gamma;
  if (f.gamma0) cfg.gamma0 = *f.gamma0;
  if (f.omega) cfg.omega = *f.omega;
  if (f.patch_radius) cfg.patch_radius = *f.patch_radius;
  if (f.gf_radius) cfg.gf_radius = *f.gf_radius;
  if (f.gf_epsilon) cfg.gf_epsilon = *f.gf_epsilon;
  if (f.no_stretch) cfg.stretch_enabled = false;
  if (f.unit_eta) cfg.force_unit_eta = true;
  for (const auto& kv : f.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::string run_manifest(const fs::path& input, const fs::path& output, const PipelineConfig& cfg,
                         const std::vector<StageTiming>& timings,
                         const std::vector<fs::path>& extra_outputs) {
  std::ostringstream m;
  m << "# nighthaze run manifest; replay with --config <this file>\n";
  m << cfg.to_text();
  m << "run.tool_version = " << kToolVersion << '\n'
    << "run.input = " << input.string() << '\n'
    << "run.output = " << output.string() << '\n';
  for (const auto& extra : extra_outputs) m << "run.intermediate = " << extra.string() << '\n';
  for (const auto& t : timings) m << "run.stage." << t.stage << "_ms = " << format_double(t.milliseconds) << '\n';
  return m.str();
}

void dehaze_one(const fs::path& input, const fs::path& output, const PipelineConfig& cfg,
                bool dump) {
  const PlanarImage img = read_image(input);
  if (img.channels() != 3) throw InvalidArgument("'" + input.string() + "' is not a color image");
  const PipelineResult result = run_pipeline(img, cfg);
  if (output.has_parent_path()) fs::create_directories(output.parent_path());
  write_image(output, result.output);
  std::vector<fs::path> extras;
  if (dump) {
    for (const auto& [name, map] : result.intermediates()) {
      const fs::path p = with_suffix(output, "_" + name, ".png");
      write_image(p, *map);
      extras.push_back(p);
    }
  }
  write_text(with_suffix(output, ".manifest", ".txt"),
             run_manifest(input, output, cfg, result.timings, extras));
}

int exit_code_for(const std::exception_ptr& ep, std::ostream& err) {
  try {
    std::rethrow_exception(ep);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const DimensionError& e) {
    err << "dimension error: " << e.what() << '\n';
    return kDimensionError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

int cmd_dehaze(const std::vector<std::string>& inputs, const GlobalOptions& g,
               const PipelineFlags& f, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = resolve_pipeline_config(g, f);
  if (inputs.size() == 1) {
    const fs::path output = g.output.empty() ? with_suffix(inputs[0], "_dehazed", ".png") : fs::path(g.output);
    dehaze_one(inputs[0], output, cfg, g.dump_intermediates);
    out << output.string() << '\n';
    return kOk;
  }

  // Batch: -o names a directory; each image is processed independently.
  const fs::path dir = g.output.empty() ? fs::path(".") : fs::path(g.output);
  fs::create_directories(dir);
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(g.threads == 0 ? cores : g.threads,
                                              static_cast<unsigned>(inputs.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(inputs.size());
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < inputs.size(); i = next++) {
          try {
            const fs::path in = inputs[i];
            dehaze_one(in, dir / (in.stem().string() + "_dehazed.png"), cfg, g.dump_intermediates);
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      });
    }
  }
  int code = kOk;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (failures[i]) {
      err << inputs[i] << ": ";
      const int c = exit_code_for(failures[i], err);
      if (code == kOk) code = c;
    } else {
      out << (dir / (fs::path(inputs[i]).stem().string() + "_dehazed.png")).string() << '\n';
    }
  }
  return code;
}

// --------------------------------------------------------------- decompose

int cmd_decompose(const std::string& input, const GlobalOptions& g, const PipelineFlags& f,
                  std::ostream& out) {
  const PipelineConfig cfg = resolve_pipeline_config(g, f);
  const PlanarImage img = read_image(input);
  if (img.channels() != 3) throw InvalidArgument("'" + input + "' is not a color image");
  const DecompositionResult dec = decompose(img, cfg);
  PlanarImage compensated = gamma_correct(dec, cfg.gamma);
  if (cfg.stretch_enabled && cfg.stretch_stage == StretchStage::AfterGamma) compensated = stretch(compensated, cfg.stretch_lo, cfg.stretch_hi);

  const fs::path base = g.output.empty() ? fs::path(input) : fs::path(g.output);
  const fs::path l_path = with_suffix(base, "_illumination", ".png");
  const fs::path r_path = with_suffix(base, "_reflectance", ".png");
  const fs::path c_path = with_suffix(base, "_compensated", ".png");
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  write_image(l_path, dec.illumination);
  write_image(r_path, dec.surrogate_reflectance);
  write_image(c_path, compensated);
  out << l_path.string() << '\n' << r_path.string() << '\n' << c_path.string() << '\n';
  return kOk;
}

// ------------------------------------------------------------------- synth

struct SynthFlags {
  std::optional<double> beta;
  std::optional<double> alpha;
  std::optional<std::string> light_color;
  std::optional<int> env_patch_radius;
  std::optional<double> env_gf_epsilon;
  std::optional<double> focal_scale;
};

int cmd_synth(const std::string& clear_path, const std::string& disparity_path, const GlobalOptions& g,
              const SynthFlags& f, std::ostream& out) {
  SynthConfig cfg;
  if (const auto src = config_source(g)) parse_synth_config(read_text(*src), cfg);
  if (f.beta) cfg.beta = *f.beta;
  if (f.alpha) cfg.alpha = *f.alpha;
  if (f.light_color) cfg.set("light_color", *f.light_color);
  if (f.env_patch_radius) cfg.env_patch_radius = *f.env_patch_radius;
  if (f.env_gf_epsilon) cfg.env_gf_epsilon = *f.env_gf_epsilon;
  if (f.focal_scale) cfg.focal_scale = *f.focal_scale;
  cfg.validate();

  const PlanarImage clear = read_image(clear_path);
  PlanarImage disparity = read_image(disparity_path);
  if (clear.channels() != 3) throw InvalidArgument("'" + clear_path + "' is not a color image");
  if (disparity.channels() != 1) disparity = disparity.channel(0);
  const SyntheticScene scene = generate(clear, disparity, cfg);
  const fs::path dir = g.output.empty() ? fs::path("scene") : fs::path(g.output);
  write_scene(dir, scene, cfg);
  out << dir.string() << '\n';
  return kOk;
}

// -------------------------------------------------------------------- eval

int cmd_eval(const std::vector<std::string>& paths, const std::string& metric_list,
             const GlobalOptions& g, std::ostream& out) {
  if (paths.empty() || paths.size() % 2 != 0) {
    throw ConfigError("eval expects RESULT REFERENCE pairs");
  }
  std::vector<std::string> metrics;
  {
    std::stringstream ss(metric_list);
    std::string m;
    while (std::getline(ss, m, ',')) {
      if (m != "psnr" && m != "ssim" && m != "rmse" && m != "visual") {
        throw ConfigError("unknown metric '" + m + "'");
      }
      metrics.push_back(m);
    }
  }
  EvalReport report;
  for (std::size_t i = 0; i < paths.size(); i += 2) {
    const PlanarImage result = read_image(paths[i]);
    const PlanarImage reference = read_image(paths[i + 1]);
    const std::string& name = paths[i];
    for (const auto& m : metrics) {
      if (m == "psnr") report.add(name, "psnr", psnr(result, reference));
      if (m == "ssim") report.add(name, "ssim", ssim(result, reference));
      if (m == "rmse") report.add(name, "rmse", rmse(result, reference));
      if (m == "visual") {
        const VisualMeasure vm = visual_measure(result);
        report.add(name, "visual_mean", vm.mean_of_means);
        report.add(name, "visual_std", vm.mean_of_stds);
        report.add(name, "visual_product", vm.product);
      }
    }
  }
  const fs::path base = g.output.empty() ? fs::path("report") : fs::path(g.output);
  if (base.has_parent_path()) fs::create_directories(base.parent_path());
  write_text(with_suffix(base, "", ".csv"), report.to_csv());
  write_text(with_suffix(base, "", ".json"), report.to_json());
  out << report.to_csv();
  return kOk;
}

// ------------------------------------------------------------------- bench

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    const int w = std::stoi(text.substr(0, x));
    const int h = std::stoi(text.substr(x + 1));
    if (w < 1 || h < 1) throw std::invalid_argument(text);
    return {w, h};
  } catch (const std::exception&) {
    throw ConfigError("size '" + text + "' is not of the form WxH");
  }
}

int cmd_bench(const std::vector<std::string>& sizes, int reps, const GlobalOptions& g,
              const PipelineFlags& f, std::ostream& out) {
  if (sizes.empty()) throw ConfigError("bench needs at least one size");
  if (reps < 1) throw ConfigError("--reps must be >= 1");
  const PipelineConfig cfg = resolve_pipeline_config(g, f);
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "width,height,pixels,median_ms,ratio_to_previous\n";
  double previous = 0.0;
  for (const auto& s : sizes) {
    const auto [w, h] = parse_size(s);
    PlanarImage img(w, h, 3);
    for (double& v : img.data()) v = uniform(rng);
    std::vector<double> times;
    for (int r = 0; r < reps; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const PipelineResult result = run_pipeline(img, cfg);
      times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    }
    std::ranges::sort(times);
    const double median = times[times.size() / 2];
    const double ratio = previous > 0.0 ? median / previous : 0.0;
    previous = median;
    csv << w << ',' << h << ',' << static_cast<long long>(w) * h << ',' << format_double(median) << ','
        << format_double(ratio) << '\n';
    rows.push_back({{"width", w}, {"height", h}, {"pixels", static_cast<long long>(w) * h},
                    {"median_ms", median}, {"ratio_to_previous", ratio}});
  }
  if (!g.output.empty()) {
    const fs::path base(g.output);
    if (base.has_parent_path()) fs::create_directories(base.parent_path());
    write_text(with_suffix(base, "", ".csv"), csv.str());
    write_text(with_suffix(base, "", ".json"), rows.dump(2) + "\n");
  }
  out << csv.str();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nighttime haze removal toolkit", "nighthaze"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GlobalOptions g;
  PipelineFlags pf;
  SynthFlags sf;

  std::vector<std::string> dehaze_inputs;
  auto* dehaze_cmd = app.add_subcommand("dehaze", "restore one or more nighttime hazy images");
  dehaze_cmd->add_option("inputs", dehaze_inputs, "input images")->required();
  add_global_options(dehaze_cmd, g);
  add_pipeline_flags(dehaze_cmd, pf);

  std::string decompose_input;
  auto* decompose_cmd = app.add_subcommand("decompose", "write illumination and reflectance layers");
  decompose_cmd->add_option("input", decompose_input, "input image")->required();
  add_global_options(decompose_cmd, g);
  add_pipeline_flags(decompose_cmd, pf);

  std::string clear_path;
  std::string disparity_path;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic nighttime hazy scene");
  synth_cmd->add_option("clear", clear_path, "clear image")->required();
  synth_cmd->add_option("disparity", disparity_path, "disparity map")->required();
  add_global_options(synth_cmd, g);
  synth_cmd->add_option("--beta", sf.beta, "illumination falloff (default 0.8)");
  synth_cmd->add_option("--alpha", sf.alpha, "scattering mix weight (default 0.5)");
  synth_cmd->add_option("--light-color", sf.light_color, "r,g,b light color (default 1,1,0.3)");
  synth_cmd->add_option("--env-patch-radius", sf.env_patch_radius, "environmental light radius (default 16)");
  synth_cmd->add_option("--env-gf-epsilon", sf.env_gf_epsilon, "environmental light regularizer (default 0.1)");
  synth_cmd->add_option("--focal-scale", sf.focal_scale, "focal length / image width (default 1)");

  std::vector<std::string> eval_paths;
  std::string eval_metrics = "psnr,ssim,rmse";
  auto* eval_cmd = app.add_subcommand("eval", "compare results against references");
  eval_cmd->add_option("pairs", eval_paths, "RESULT REFERENCE [RESULT REFERENCE ...]")->required();
  eval_cmd->add_option("--metrics", eval_metrics, "comma list of psnr,ssim,rmse,visual");
  add_global_options(eval_cmd, g);

  std::vector<std::string> bench_sizes;
  int bench_reps = 3;
  auto* bench_cmd = app.add_subcommand("bench", "time the full pipeline at several image sizes");
  bench_cmd->add_option("--sizes", bench_sizes, "WxH sizes")->delimiter(',')->required();
  bench_cmd->add_option("--reps", bench_reps, "repetitions per size (median reported)");
  add_global_options(bench_cmd, g);
  add_pipeline_flags(bench_cmd, pf);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (dehaze_cmd->parsed()) return cmd_dehaze(dehaze_inputs, g, pf, out, err);
    if (decompose_cmd->parsed()) return cmd_decompose(decompose_input, g, pf, out);
    if (synth_cmd->parsed()) return cmd_synth(clear_path, disparity_path, g, sf, out);
    if (eval_cmd->parsed()) return cmd_eval(eval_paths, eval_metrics, g, out);
    if (bench_cmd->parsed()) return cmd_bench(bench_sizes, bench_reps, g, pf, out);
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
  return kFailure;
}

}  // namespace nighthaze::cli
