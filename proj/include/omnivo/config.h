#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace omnivo {

// Experiment parameters shared by the command-line tools.
struct RunConfig {
  std::string preset = "default";
  int width = 3840;
  int height = 1920;
  int patches_per_frame = 192;
  std::string selection = "gradient";
  int radius = 3;
  int window = 10;
  int iterations = 8;
  double damping = 1e-4;
  double pose_sigma = 0.05;
  double depth_sigma = 0.05;
  double pixel_sigma = 0.0;
  std::uint64_t seed = 0;
  int frames = 10;
  int points = 4000;
  std::string profile = "random-walk";
  double step = 0.1;
  double turn = 0.05;
  std::string output_dir = ".";

  // Throws InvalidArgument on non-positive counts, an invalid resolution or
  // negative noise.
  void validate() const;
};

// Full-resolution and half-resolution parameter sets.
RunConfig preset_config(const std::string& name);

// Sets one field from its textual value. Throws InvalidArgument on unknown
// keys or unparsable values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

// `key = value` lines, `#` comments. Throws IoError or ParseError.
std::map<std::string, std::string> read_key_values(const std::string& path);

void apply_key_values(RunConfig& config, const std::map<std::string, std::string>& values);

std::string format_config(const RunConfig& config);

}  // namespace omnivo
