#include "omnivo/config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "omnivo/error.h"
#include "omnivo/sphere_camera.h"

namespace omnivo {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long long parse_integer(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long long x = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || *end != '\0') {
    throw Error(ErrorCode::kInvalidArgument, key + ": invalid integer '" + value + "'");
  }
  return x;
}

double parse_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0') {
    throw Error(ErrorCode::kInvalidArgument, key + ": invalid number '" + value + "'");
  }
  return x;
}

}  // namespace

void RunConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw Error(ErrorCode::kInvalidArgument, std::string(name) + " must be >= 1");
  };
  SphericalCamera(width, height);
  positive(patches_per_frame, "patches_per_frame");
  positive(radius, "radius");
  positive(iterations, "iterations");
  positive(frames, "frames");
  positive(points, "points");
  if (window < 2) throw Error(ErrorCode::kInvalidArgument, "window must be >= 2");
  if (damping < 0.0) throw Error(ErrorCode::kInvalidArgument, "damping must be >= 0");
  if (pose_sigma < 0.0 || depth_sigma < 0.0 || pixel_sigma < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "noise levels must be >= 0");
  }
  if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "step must be > 0");
  if (turn < 0.0) throw Error(ErrorCode::kInvalidArgument, "turn must be >= 0");
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  if (name == "default") return c;
  if (name == "fast") {
    c.preset = "fast";
    c.width = 1920;
    c.height = 960;
    c.patches_per_frame = 96;
    return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown preset '" + name + "'");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  auto as_int = [&] { return static_cast<int>(parse_integer(key, value)); };
  if (key == "preset") {
    c = preset_config(value);
  } else if (key == "width") {
    c.width = as_int();
  } else if (key == "height") {
    c.height = as_int();
  } else if (key == "patches_per_frame") {
    c.patches_per_frame = as_int();
  } else if (key == "selection") {
    c.selection = value;
  } else if (key == "radius") {
    c.radius = as_int();
  } else if (key == "window") {
    c.window = as_int();
  } else if (key == "iterations") {
    c.iterations = as_int();
  } else if (key == "damping") {
    c.damping = parse_real(key, value);
  } else if (key == "pose_sigma") {
    c.pose_sigma = parse_real(key, value);
  } else if (key == "depth_sigma") {
    c.depth_sigma = parse_real(key, value);
  } else if (key == "pixel_sigma") {
    c.pixel_sigma = parse_real(key, value);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(parse_integer(key, value));
  } else if (key == "frames") {
    c.frames = as_int();
  } else if (key == "points") {
    c.points = as_int();
  } else if (key == "profile") {
    c.profile = value;
  } else if (key == "step") {
    c.step = parse_real(key, value);
  } else if (key == "turn") {
    c.turn = parse_real(key, value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown config key '" + key + "'");
  }
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path);
  std::map<std::string, std::string> values;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos || trim(text.substr(0, eq)).empty()) {
      throw Error(ErrorCode::kParseError,
                  path + ":" + std::to_string(line) + ": expected key = value");
    }
    values[trim(text.substr(0, eq))] = trim(text.substr(eq + 1));
  }
  return values;
}

void apply_key_values(RunConfig& config, const std::map<std::string, std::string>& values) {
  // A preset replaces everything, so it goes first.
  if (auto it = values.find("preset"); it != values.end()) set_config_value(config, it->first, it->second);
  for (const auto& [k, v] : values) {
    if (k != "preset") set_config_value(config, k, v);
  }
}

std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  out << "preset = " << c.preset << '\n'
      << "resolution = " << c.width << "x" << c.height << '\n'
      << "patches_per_frame = " << c.patches_per_frame << '\n'
      << "selection = " << c.selection << '\n'
      << "radius = " << c.radius << '\n'
      << "window = " << c.window << '\n'
      << "iterations = " << c.iterations << '\n'
      << "damping = " << c.damping << '\n';
  return out.str();
}

}  // namespace omnivo
