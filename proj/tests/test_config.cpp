#include <doctest.h>

#include <random>

#include "qdgate/config.hpp"
#include "fixtures.hpp"

using namespace qdgate;

namespace {

const char* kSimulate = R"(mode = simulate
device.gate = cnot
device.j = 0.42
device.fields = 2.0, 1.0
device.b_ac = 4e-3
)";

std::string key_of(const ConfigError& e) { return e.key(); }

}  // namespace

TEST_CASE("round trip over random specs") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100; ++i) {
    const RunSpec s = test::random_spec(rng);
    const std::string text = render_config(s);
    const RunSpec back = parse_config(text);
    CHECK_MESSAGE(back == s, text);
    CHECK(render_config(back) == text);
  }
}

TEST_CASE("minimal simulate config uses defaults") {
  const RunSpec s = parse_config(kSimulate);
  CHECK(s.mode == Mode::Simulate);
  CHECK(s.device.static_fields == std::vector<double>{2.0, 1.0});
  CHECK(s.device.g_factor == 2.0);
  CHECK_FALSE(s.device.drive_frequency.has_value());
  CHECK(s.noise == NoiseConfig{});
  CHECK(s.simulate.samples == 2000);
  CHECK(s.simulate.initial_state == 0);
  CHECK(s.output_path == ".");
}

TEST_CASE("log axis defaults to 60 points per decade") {
  const RunSpec s = parse_config(R"(mode = ranges
device.gate = cnot
device.j = 0.0042
device.b_ac = 4e-5
sweep.start = 1e-3
sweep.stop = 1e-1
sweep.fixed_fields = 8e-3
)");
  CHECK(s.axis.points == 121);
  CHECK(s.axis.scale == Scale::Log);
  CHECK(s.refine);
}

TEST_CASE("comments, spacing and scientific notation") {
  const RunSpec s = parse_config(std::string(kSimulate) +
                                 "  # comment line\nnoise.t2_star = 1.5E3   # ns\nsimulate.initial_state = ↓↑\n");
  CHECK(s.noise.t2_star_ns == 1500.0);
  CHECK(s.simulate.initial_state == 2);
}

TEST_CASE("errors name the offending key") {
  auto err = [](const std::string& text) -> std::string {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return key_of(e);
    }
    return "<none>";
  };
  CHECK(err(std::string(kSimulate) + "device.colour = red\n") == "device.colour");
  CHECK(err(std::string(kSimulate) + "device.j = 0.1\n") == "device.j");  // duplicate
  CHECK(err(std::string(kSimulate) + "device.j12 = 0.1\n") == "device.j12");
  CHECK(err(std::string(kSimulate) + "sweep.start = 0.1\n") == "sweep.start");
  CHECK(err(std::string(kSimulate) + "noise.t2_star = -1\n") == "noise.t2_star");
  CHECK(err(std::string(kSimulate) + "noise.phonon = maybe\n") == "noise.phonon");
  CHECK(err(std::string(kSimulate) + "simulate.initial_state = uuu\n") == "simulate.initial_state");
  CHECK(err(std::string(kSimulate) + "thresholds.lower = 0.9\n") == "thresholds.lower");
  CHECK(err("mode = simulate\ndevice.gate = cnot\ndevice.j = 0.4\ndevice.b_ac = 1e-3\n") == "device.fields");
  CHECK(err(R"(mode = ranges
device.gate = cnot
device.j = 0.42
device.b_ac = 4e-3
sweep.start = 0.1
sweep.stop = 1
sweep.scale = linear
sweep.fixed_fields = 1
)") == "sweep.points");
  CHECK(err("device.gate = cnot\n") == "mode");
}

TEST_CASE("mode from the command line must agree") {
  CHECK(parse_config(kSimulate, Mode::Simulate).mode == Mode::Simulate);
  CHECK_THROWS_AS(parse_config(kSimulate, Mode::Ranges), ConfigError);
  const std::string no_mode = std::string(kSimulate).substr(std::string(kSimulate).find('\n') + 1);
  CHECK(parse_config(no_mode, Mode::Simulate).mode == Mode::Simulate);
}

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
}
