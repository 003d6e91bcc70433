#include "nighthaze/synth.hpp"

#include <zlib.h>

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>

#include "nighthaze/config.hpp"
#include "nighthaze/filters.hpp"
#include "nighthaze/image_io.hpp"

namespace nighthaze {

namespace {

constexpr int kPolyBins = 64;
constexpr double kLightFloor = 1.0 / 255.0;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("synth key '" + std::string(key) + "': cannot parse '" + std::string(text) + "'");
  }
  return v;
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const char* key, const char* why) {
    throw ConfigError("synth key '" + std::string(key) + "': " + why);
  };
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha", "must be in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) fail("beta", "must be in (0, 1)");
  for (double c : light_color) {
    if (!(c > 0.0 && c <= 1.0)) fail("light_color", "components must be in (0, 1]");
  }
  if (env_patch_radius < 1) fail("env_patch_radius", "must be >= 1");
  if (!(env_gf_epsilon > 0.0)) fail("env_gf_epsilon", "must be > 0");
  if (!(focal_scale > 0.0)) fail("focal_scale", "must be > 0");
  if (!(transmission_scale > 0.0 && transmission_scale <= 1.0)) {
    fail("transmission_scale", "must be in (0, 1]");
  }
}

void SynthConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "beta") {
    beta = to_double(key, value);
  } else if (key == "alpha") {
    alpha = to_double(key, value);
  } else if (key == "light_color") {
    Rgb rgb{};
    std::size_t pos = 0;
    for (int c = 0; c < 3; ++c) {
      const auto comma = value.find(',', pos);
      if ((c < 2) == (comma == std::string_view::npos)) {
        throw ConfigError("synth key 'light_color': expected three comma-separated values");
      }
      rgb[c] = to_double(key, trim(value.substr(pos, comma == std::string_view::npos ? value.npos : comma - pos)));
      pos = comma + 1;
    }
    light_color = rgb;
  } else if (key == "env_patch_radius") {
    env_patch_radius = static_cast<int>(to_double(key, value));
  } else if (key == "env_gf_epsilon") {
    env_gf_epsilon = to_double(key, value);
  } else if (key == "focal_scale") {
    focal_scale = to_double(key, value);
  } else if (key == "transmission_scale") {
    transmission_scale = to_double(key, value);
  } else {
    throw ConfigError("unknown synth key '" + std::string(key) + "'");
  }
}

std::string SynthConfig::to_text() const {
  std::ostringstream out;
  out << "beta = " << format_double(beta) << '\n'
      << "alpha = " << format_double(alpha) << '\n'
      << "light_color = " << format_double(light_color[0]) << ',' << format_double(light_color[1])
      << ',' << format_double(light_color[2]) << '\n'
      << "env_patch_radius = " << env_patch_radius << '\n'
      << "env_gf_epsilon = " << format_double(env_gf_epsilon) << '\n'
      << "focal_scale = " << format_double(focal_scale) << '\n'
      << "transmission_scale = " << format_double(transmission_scale) << '\n';
  return out.str();
}

void parse_synth_config(std::string_view text, SynthConfig& cfg) {
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("synth config: expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.starts_with("run.") || key.starts_with("file.")) continue;
    cfg.set(key, line.substr(eq + 1));
  }
  cfg.validate();
}

PlanarImage SyntheticScene::eta_image() const {
  PlanarImage out(reflectance.width(), reflectance.height(), 3);
  for (int c = 0; c < 3; ++c) std::ranges::fill(out.plane(c), eta_true[c]);
  return out;
}

PlanarImage fill_disparity_holes(const PlanarImage& disparity) {
  require_channels(disparity, 1, "fill_disparity_holes");
  const int w = disparity.width();
  const int h = disparity.height();
  PlanarImage out = disparity;
  auto d = out.data();
  std::vector<char> valid(d.size(), 0);
  std::queue<std::size_t> frontier;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (std::isfinite(d[i]) && d[i] > 0.0) {
      valid[i] = 1;
      frontier.push(i);
    }
  }
  if (frontier.empty()) throw InvalidArgument("degenerate disparity");
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    const int x = static_cast<int>(i % static_cast<std::size_t>(w));
    const int y = static_cast<int>(i / static_cast<std::size_t>(w));
    const std::array<std::array<int, 2>, 4> steps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
    for (const auto& [dx, dy] : steps) {
      const int nx = x + dx;
      const int ny = y + dy;
      if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
      const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
      if (valid[j]) continue;
      valid[j] = 1;
      d[j] = d[i];
      frontier.push(j);
    }
  }
  return out;
}

PlanarImage raw_scene_distance(const PlanarImage& disparity, double focal_scale) {
  require_channels(disparity, 1, "scene_distance");
  if (!(focal_scale > 0.0)) throw InvalidArgument("scene_distance: focal_scale must be > 0");
  const PlanarImage d = fill_disparity_holes(disparity);
  const int w = d.width();
  const int h = d.height();
  const double focal = focal_scale * w;
  PlanarImage out(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double z = 1.0 / d.at(x, y);
      const double px = (x - w / 2.0) * z / focal;
      const double py = (y - h / 2.0) * z / focal;
      out.at(x, y) = std::sqrt(px * px + py * py + z * z);
    }
  }
  return out;
}

PlanarImage scene_distance(const PlanarImage& disparity, double focal_scale) {
  PlanarImage dis = raw_scene_distance(disparity, focal_scale);
  const double peak = *std::ranges::max_element(dis.data());
  for (double& v : dis.data()) v /= peak;
  return dis;
}

SyntheticScene generate(const PlanarImage& reflectance, const PlanarImage& disparity,
                        const SynthConfig& cfg) {
  require_channels(reflectance, 3, "generate");
  require_channels(disparity, 1, "generate");
  require_same_size(reflectance, disparity, "generate");
  cfg.validate();

  SyntheticScene s;
  s.reflectance = reflectance;
  s.eta_true = cfg.light_color;
  s.disparity = fill_disparity_holes(disparity);
  const double dmax = *std::ranges::max_element(s.disparity.data());
  for (double& v : s.disparity.data()) v /= dmax;

  s.distance = scene_distance(s.disparity, cfg.focal_scale);
  s.transmission = s.disparity;
  for (double& v : s.transmission.data()) v *= cfg.transmission_scale;
  s.illumination = s.distance;
  for (double& v : s.illumination.data()) v = 1.0 - cfg.beta * v;

  // Scattered mixture of incident and reflected light, smoothed by a guided
  // filter in place of the plain local average.
  const auto l = s.illumination.data();
  PlanarImage mixture(reflectance.width(), reflectance.height(), 3);
  for (int c = 0; c < 3; ++c) {
    auto r = reflectance.plane(c);
    auto m = mixture.plane(c);
    const double eta = cfg.light_color[c];
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = cfg.alpha * l[i] * eta + (1.0 - cfg.alpha) * l[i] * eta * r[i];
    }
  }
  const PlanarImage guide = value_channel(mixture);
  const FilterParams params{cfg.env_patch_radius, cfg.env_gf_epsilon};
  s.env_light = PlanarImage(reflectance.width(), reflectance.height(), 3);
  for (int c = 0; c < 3; ++c) s.env_light.set_channel(c, guided_filter(mixture.channel(c), guide, params));
  clamp_in_place(s.env_light, 0.0, 1.0);

  s.sigma = PlanarImage(reflectance.width(), reflectance.height(), 3);
  s.hazy = PlanarImage(reflectance.width(), reflectance.height(), 3);
  const auto t = s.transmission.data();
  for (int c = 0; c < 3; ++c) {
    auto r = reflectance.plane(c);
    auto b = s.env_light.plane(c);
    auto sigma = s.sigma.plane(c);
    auto hazy = s.hazy.plane(c);
    const double eta = cfg.light_color[c];
    for (std::size_t i = 0; i < hazy.size(); ++i) {
      sigma[i] = b[i] / std::max(l[i], kLightFloor);
      hazy[i] = l[i] * eta * r[i] * t[i] + b[i] * (1.0 - t[i]);
    }
  }

  if (forward_model_residual(s) > 1e-6) throw Error("generate: forward model self-check failed");
  return s;
}

double forward_model_residual(const SyntheticScene& s) {
  double worst = 0.0;
  const auto l = s.illumination.data();
  const auto t = s.transmission.data();
  for (int c = 0; c < 3; ++c) {
    auto r = s.reflectance.plane(c);
    auto b = s.env_light.plane(c);
    auto sigma = s.sigma.plane(c);
    auto hazy = s.hazy.plane(c);
    for (std::size_t i = 0; i < hazy.size(); ++i) {
      const double model = l[i] * s.eta_true[c] * r[i] * t[i] + b[i] * (1.0 - t[i]);
      worst = std::max(worst, std::abs(hazy[i] - model));
      worst = std::max(worst, std::abs(b[i] - l[i] * sigma[i]));
    }
  }
  return worst;
}

std::vector<double> fit_illumination_poly(const PlanarImage& hazy_l, const PlanarImage& clear_l,
                                          int degree) {
  require_channels(hazy_l, 1, "fit_illumination_poly");
  require_channels(clear_l, 1, "fit_illumination_poly");
  require_same_size(hazy_l, clear_l, "fit_illumination_poly");
  if (degree < 1) throw InvalidArgument("fit_illumination_poly: degree must be >= 1");

  struct Bin {
    std::size_t count = 0;
    double x = 0.0;
    double y = -1.0;
  };
  std::array<Bin, kPolyBins> bins{};
  const auto hx = hazy_l.data();
  const auto cy = clear_l.data();
  for (std::size_t i = 0; i < hx.size(); ++i) {
    const double x = std::clamp(hx[i], 0.0, 1.0);
    const int k = std::min(static_cast<int>(x * kPolyBins), kPolyBins - 1);
    Bin& bin = bins[k];
    ++bin.count;
    if (cy[i] > bin.y) {
      bin.y = cy[i];
      bin.x = x;
    }
  }

  std::vector<const Bin*> support;
  for (const Bin& b : bins) {
    if (b.count > 0) support.push_back(&b);
  }
  if (static_cast<int>(support.size()) < degree + 1) {
    throw InvalidArgument("fit_illumination_poly: insufficient support");
  }

  const auto rows = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd design(rows, degree + 1);
  Eigen::VectorXd target(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double w = std::sqrt(static_cast<double>(support[i]->count));
    double p = 1.0;
    for (int j = 0; j <= degree; ++j) {
      design(i, j) = w * p;
      p *= support[i]->x;
    }
    target(i) = w * support[i]->y;
  }
  const Eigen::VectorXd solution = design.colPivHouseholderQr().solve(target);
  return {solution.data(), solution.data() + solution.size()};
}

PlanarImage apply_poly(const PlanarImage& l, const std::vector<double>& coeffs, double floor) {
  require_non_empty(l, "apply_poly");
  if (coeffs.empty()) throw InvalidArgument("apply_poly: empty coefficient list");
  PlanarImage out = l;
  for (double& v : out.data()) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * v + *it;
    v = std::clamp(acc, floor, 1.0);
  }
  return out;
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  uLong crc = crc32(0L, Z_NULL, 0);
  std::vector<char> chunk(1 << 16);
  while (in) {
    in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
    const auto got = in.gcount();
    if (got > 0) crc = crc32(crc, reinterpret_cast<const Bytef*>(chunk.data()), static_cast<uInt>(got));
  }
  return static_cast<std::uint32_t>(crc);
}

void write_scene(const std::filesystem::path& dir, const SyntheticScene& scene, const SynthConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  const std::vector<std::pair<std::string, const PlanarImage*>> fields = {
      {"reflectance.png", &scene.reflectance}, {"disparity.png", &scene.disparity},
      {"distance.png", &scene.distance},       {"transmission.png", &scene.transmission},
      {"illumination.png", &scene.illumination}, {"sigma.png", &scene.sigma},
      {"env_light.png", &scene.env_light},     {"hazy.png", &scene.hazy},
  };
  const PlanarImage eta = scene.eta_image();

  std::ostringstream manifest;
  manifest << "# synthetic nighttime hazy scene\n" << cfg.to_text();
  manifest << "run.width = " << scene.reflectance.width() << '\n'
           << "run.height = " << scene.reflectance.height() << '\n';
  auto emit = [&](const std::string& name, const PlanarImage& img) {
    const auto path = dir / name;
    write_image(path, img, 16);
    char hex[16];
    std::snprintf(hex, sizeof(hex), "%08x", file_crc32(path));
    manifest << "file." << name << " = crc32:" << hex << '\n';
  };
  for (const auto& [name, img] : fields) emit(name, *img);
  emit("eta.png", eta);

  std::ofstream out(dir / "manifest.txt");
  out << manifest.str();
  if (!out) throw IoError("cannot write manifest in '" + dir.string() + "'");
}

}  // namespace nighthaze
