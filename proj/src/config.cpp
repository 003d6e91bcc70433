#include "nighthaze/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace nighthaze {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    // Fractions such as "1/3" are accepted for exponents.
    const auto slash = value.find('/');
    if (slash != std::string_view::npos) {
      const double num = parse_double(key, trim(value.substr(0, slash)));
      const double den = parse_double(key, trim(value.substr(slash + 1)));
      if (den == 0.0) throw ConfigError("config key '" + std::string(key) + "': division by zero");
      return num / den;
    }
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) +
                      "' as a number");
  }
  return out;
}

int parse_int(std::string_view key, std::string_view value) {
  int out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) +
                      "' as an integer");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) +
                    "' as a boolean");
}

const char* to_string(DecomposeMode m) {
  return m == DecomposeMode::SinglePass ? "single_pass" : "two_pass";
}

const char* to_string(StretchStage s) {
  return s == StretchStage::AfterColor ? "after_color" : "after_gamma";
}

const char* to_string(AmplificationMode m) {
  return m == AmplificationMode::PerPixel ? "per_pixel" : "global";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void PipelineConfig::validate() const {
  auto fail = [](const char* key, const std::string& why) {
    throw ConfigError("config key '" + std::string(key) + "': " + why);
  };
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma", "must be in (0, 1]");
  if (!(gamma0 > 0.0 && gamma0 <= 1.0)) fail("gamma0", "must be in (0, 1]");
  if (patch_radius < 1) fail("patch_radius", "must be >= 1");
  if (gf_radius < 1) fail("gf_radius", "must be >= 1");
  if (!(gf_epsilon > 0.0)) fail("gf_epsilon", "must be > 0");
  if (!(omega >= 0.0 && omega <= 1.0)) fail("omega", "must be in [0, 1]");
  if (!(t_floor > 0.0 && t_floor < 1.0)) fail("t_floor", "must be in (0, 1)");
  if (!(eta_floor > 0.0 && eta_floor < 1.0)) fail("eta_floor", "must be in (0, 1)");
  if (!(log_floor > 0.0 && log_floor < 1.0)) fail("log_floor", "must be in (0, 1)");
  if (!(stretch_lo >= 0.0 && stretch_hi <= 100.0)) fail("stretch_lo", "ranks must lie in [0, 100]");
  if (!(stretch_lo < stretch_hi)) fail("stretch_lo", "must be below stretch_hi");
}

std::vector<std::string> PipelineConfig::keys() {
  return {"gamma",      "gamma0",     "patch_radius",    "gf_radius",      "gf_epsilon",
          "omega",      "t_floor",    "eta_floor",       "stretch_lo",     "stretch_hi",
          "log_floor",  "stretch_enabled", "stretch_stage",  "decompose_mode", "amplification",
          "force_unit_eta"};
}

void PipelineConfig::set(std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "gamma") {
    gamma = parse_double(key, value);
  } else if (key == "gamma0") {
    gamma0 = parse_double(key, value);
  } else if (key == "patch_radius") {
    patch_radius = parse_int(key, value);
  } else if (key == "gf_radius") {
    gf_radius = parse_int(key, value);
  } else if (key == "gf_epsilon") {
    gf_epsilon = parse_double(key, value);
  } else if (key == "omega") {
    omega = parse_double(key, value);
  } else if (key == "t_floor") {
    t_floor = parse_double(key, value);
  } else if (key == "eta_floor") {
    eta_floor = parse_double(key, value);
  } else if (key == "stretch_lo") {
    stretch_lo = parse_double(key, value);
  } else if (key == "stretch_hi") {
    stretch_hi = parse_double(key, value);
  } else if (key == "log_floor") {
    log_floor = parse_double(key, value);
  } else if (key == "stretch_enabled") {
    stretch_enabled = parse_bool(key, value);
  } else if (key == "force_unit_eta") {
    force_unit_eta = parse_bool(key, value);
  } else if (key == "stretch_stage") {
    if (value == "after_color") {
      stretch_stage = StretchStage::AfterColor;
    } else if (value == "after_gamma") {
      stretch_stage = StretchStage::AfterGamma;
    } else {
      throw ConfigError("config key 'stretch_stage': expected after_color or after_gamma");
    }
  } else if (key == "decompose_mode") {
    if (value == "single_pass") {
      decompose_mode = DecomposeMode::SinglePass;
    } else if (value == "two_pass") {
      decompose_mode = DecomposeMode::TwoPass;
    } else {
      throw ConfigError("config key 'decompose_mode': expected single_pass or two_pass");
    }
  } else if (key == "amplification") {
    if (value == "per_pixel") {
      amplification = AmplificationMode::PerPixel;
    } else if (value == "global") {
      amplification = AmplificationMode::Global;
    } else {
      throw ConfigError("config key 'amplification': expected per_pixel or global");
    }
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::string PipelineConfig::to_text() const {
  std::ostringstream out;
  out << "gamma = " << format_double(gamma) << '\n'
      << "gamma0 = " << format_double(gamma0) << '\n'
      << "patch_radius = " << patch_radius << '\n'
      << "gf_radius = " << gf_radius << '\n'
      << "gf_epsilon = " << format_double(gf_epsilon) << '\n'
      << "omega = " << format_double(omega) << '\n'
      << "t_floor = " << format_double(t_floor) << '\n'
      << "eta_floor = " << format_double(eta_floor) << '\n'
      << "stretch_lo = " << format_double(stretch_lo) << '\n'
      << "stretch_hi = " << format_double(stretch_hi) << '\n'
      << "log_floor = " << format_double(log_floor) << '\n'
      << "stretch_enabled = " << (stretch_enabled ? "true" : "false") << '\n'
      << "stretch_stage = " << to_string(stretch_stage) << '\n'
      << "decompose_mode = " << to_string(decompose_mode) << '\n'
      << "amplification = " << to_string(amplification) << '\n'
      << "force_unit_eta = " << (force_unit_eta ? "true" : "false") << '\n';
  return out.str();
}

void parse_config(std::string_view text, PipelineConfig& cfg) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (key.starts_with("run.")) continue;
    cfg.set(key, line.substr(eq + 1));
  }
  cfg.validate();
}

void apply_config_file(const std::filesystem::path& path, PipelineConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  parse_config(buffer.str(), cfg);
}

PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  apply_config_file(path, cfg);
  return cfg;
}

}  // namespace nighthaze
