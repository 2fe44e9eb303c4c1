#include <doctest.h>

#include <string>

#include "qrasp/config.hpp"

using namespace qrasp;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("full config") {
  const SimConfig c = parse_config(R"(
# experiment
[mesh]
width = 4
height = 4

[router]
vcs_per_port = 6
buffer_depth = 8     # deeper buffers
learning_queue_capacity = 2

[policy]
name = "crq"
alpha = 0.25
gamma = 0.8
mu = 0.3
shared_path = false
count_arriving_vc = false
exploration = 0.01
crq_half_life = 256
crq_floor = 0.125

[traffic]
schedule = "transpose:500, bit_reversal:700"
injection_rate = 0.15
packet_len = 5

[run]
warmup_cycles = 10
measure_cycles = 20
drain_timeout = 30
seed = 18446744073709551615
window_cycles = 7
)");
  CHECK(c.mesh == MeshConfig{4, 4});
  CHECK(c.router.vcs_per_port == 6);
  CHECK(c.router.buffer_depth == 8);
  CHECK(c.router.learning_queue_capacity == 2);
  CHECK(c.policy.kind == PolicyKind::Crq);
  CHECK(c.policy.alpha == 0.25);
  CHECK(c.policy.gamma == 0.8);
  CHECK(c.policy.mu == 0.3);
  CHECK_FALSE(c.policy.shared_path);
  CHECK_FALSE(c.policy.count_arriving_vc);
  CHECK(c.policy.exploration == 0.01);
  CHECK(c.policy.crq_half_life == 256);
  CHECK(c.policy.crq_floor == 0.125);
  REQUIRE(c.traffic.phases.size() == 2);
  CHECK(c.traffic.phases[1] == TrafficPhase{PatternKind::BitReversal, 700});
  CHECK(c.traffic.injection_rate == 0.15);
  CHECK(c.traffic.packet_len == 5);
  CHECK(c.warmup_cycles == 10);
  CHECK(c.measure_cycles == 20);
  CHECK(c.drain_timeout == 30);
  CHECK(c.seed == 18446744073709551615ull);
  CHECK(c.window_cycles == 7);
}

TEST_CASE("empty config keeps defaults") {
  const SimConfig c = parse_config("");
  const SimConfig d;
  CHECK(format_config(c) == format_config(d));
  CHECK(c.policy.kind == PolicyKind::Qrasp);
  CHECK_FALSE(c.policy.alpha.has_value());
}

TEST_CASE("format round-trips") {
  SimConfig c;
  c.mesh = {4, 4};
  c.policy.kind = PolicyKind::Bilcq;
  c.policy.alpha = 0.35;
  c.policy.mu = 0.1;
  c.traffic = default_interval_schedule(1234);
  c.traffic.injection_rate = 0.0123;
  c.seed = 42;
  const std::string text = format_config(c);
  const SimConfig back = parse_config(text);
  CHECK(format_config(back) == text);
  CHECK(back.traffic.phases == c.traffic.phases);
  CHECK(back.policy.alpha == 0.35);
  CHECK(back.traffic.injection_rate == 0.0123);
}

TEST_CASE("unknown keys are rejected with key and line") {
  const std::string text = "[policy]\nname = \"qrasp\"\nalhpa = 0.5\n";
  CHECK(error_line(text) == 3);
  CHECK(error_text(text).find("alhpa") != std::string::npos);
  CHECK(error_text(text).find("line 3") != std::string::npos);

  CHECK(error_line("[mesh]\nwidth = 4\n[bogus]\n") == 3);
  CHECK(error_line("width = 4\n") == 1);                   // before any section
  CHECK(error_line("[mesh]\nwidth = 4\nwidth = 5\n") == 3);  // duplicate
  CHECK(error_line("[mesh]\nwidth 4\n") == 2);
  CHECK(error_line("[mesh\n") == 1);
}

TEST_CASE("value types are checked") {
  CHECK(error_line("[mesh]\nwidth = four\n") == 2);
  CHECK(error_line("[mesh]\nwidth = 4.5\n") == 2);
  CHECK(error_line("[mesh]\nwidth = \"4\"\n") == 2);
  CHECK(error_line("[policy]\nshared_path = yes\n") == 2);
  CHECK(error_line("[policy]\nname = \"qrsap\"\n") == 2);
  CHECK(error_line("[traffic]\nschedule = \"transpose\"\n") == 2);
  CHECK(error_line("[traffic]\nschedule = \"transpose:0\"\n") == 2);
  CHECK(error_line("[traffic]\nschedule = \"transpose:100\n") == 2);
  CHECK(error_text("[policy]\nmu = 2.0\n").find("mu") != std::string::npos);
  CHECK_THROWS_AS(parse_config("[traffic]\ninjection_rate = 1.0\npacket_len = 1\n[mesh]\nwidth = 1\n"),
                  ConfigError);
}

TEST_CASE("comments and quoting") {
  const SimConfig c = parse_config("[policy]   # trailing\n  name = \"xy\"  # c\n\n#[mesh]\n");
  CHECK(c.policy.kind == PolicyKind::Xy);
  CHECK(c.mesh.width == 8);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(load_config("/nonexistent/qrasp.toml"), ConfigError);
}

TEST_CASE("shipped default config matches built-in defaults") {
  CHECK(format_config(load_config(QRASP_SOURCE_DIR "/configs/default.toml")) == format_config(SimConfig{}));
}
