#pragma once

// Run configuration: flat "key = value" text, '#' starts a comment.
// Fields are in tesla, energies in ueV, times in ns. See README for the keys.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qdgate/device_model.hpp"
#include "qdgate/gate_analysis.hpp"
#include "qdgate/integrator.hpp"
#include "qdgate/noise_model.hpp"

namespace qdgate {

enum class Mode { Simulate, Sweep, Ranges };
enum class Frame { Rwa, Lab };

std::string to_string(Mode m);
Mode parse_mode(std::string_view s);
std::string to_string(Frame f);
Frame parse_frame(std::string_view s);

struct SimulateOptions {
  std::size_t initial_state = 0;  // basis index
  Frame frame = Frame::Rwa;
  std::size_t samples = 2000;
  /// nullopt: run to the flip time.
  std::optional<double> t_end_ns;

  bool operator==(const SimulateOptions&) const = default;
};

struct RunSpec {
  Mode mode = Mode::Simulate;
  DeviceConfig device;  // static_fields empty in sweep/ranges mode
  NoiseConfig noise;
  Thresholds thresholds;
  SweepAxis axis;
  std::vector<double> fixed_fields;  // one sweep line per entry
  bool refine = true;
  SimulateOptions simulate;
  SolverOptions solver;
  std::string output_path = ".";
  unsigned workers = 1;

  bool operator==(const RunSpec&) const = default;
};

inline constexpr double kDefaultPointsPerDecade = 60.0;

class ConfigError : public Error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& what);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// `mode` overrides (and must agree with) a mode given in the text.
RunSpec parse_config(std::string_view text, std::optional<Mode> mode = std::nullopt);
RunSpec load_config(const std::string& path, std::optional<Mode> mode = std::nullopt);
/// Text that parses back to an identical RunSpec.
std::string render_config(const RunSpec& spec);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace qdgate
