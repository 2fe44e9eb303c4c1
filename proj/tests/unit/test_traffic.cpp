#include <doctest.h>

#include <cmath>
#include <vector>

#include "qrasp/traffic.hpp"

using namespace qrasp;

namespace {

const MeshConfig k8{8, 8};

// Independent oracles on 6-bit addresses, written bit by bit.
int reverse6(int v) {
  int r = 0;
  for (int i = 0; i < 6; ++i) r = (r << 1) | ((v >> i) & 1);
  return r;
}
int swap_msb_lsb6(int v) {
  const int msb = (v >> 5) & 1, lsb = v & 1;
  return (v & 0b011110) | (lsb << 5) | msb;
}

}  // namespace

TEST_CASE("permutation examples") {
  Rng rng(1, 0, Rng::Purpose::Destination);
  CHECK(dest_for(PatternKind::Transpose, 10, k8, rng) == 17);
  CHECK(dest_for(PatternKind::BitReversal, 1, k8, rng) == 32);
  CHECK(dest_for(PatternKind::Butterfly, 3, k8, rng) == 34);
  CHECK_FALSE(dest_for(PatternKind::Transpose, 9, k8, rng).has_value());  // diagonal
  CHECK_FALSE(dest_for(PatternKind::BitReversal, 0, k8, rng).has_value());
  CHECK(rng.draws() == 0);  // permutations never consume randomness
}

TEST_CASE("permutations match oracles and are involutions") {
  Rng rng(1, 0, Rng::Purpose::Destination);
  for (NodeId s = 0; s < 64; ++s) {
    const Coord c = id_to_coord(s, k8);
    const NodeId t = coord_to_id({c.y, c.x}, k8);
    const struct {
      PatternKind kind;
      int want;
    } cases[] = {{PatternKind::Transpose, t},
                 {PatternKind::BitReversal, reverse6(s)},
                 {PatternKind::Butterfly, swap_msb_lsb6(s)}};
    for (const auto& c2 : cases) {
      const auto d = dest_for(c2.kind, s, k8, rng);
      if (c2.want == s) {
        CHECK_FALSE(d.has_value());
        continue;
      }
      REQUIRE(d.has_value());
      CHECK(*d == c2.want);
      CHECK(dest_for(c2.kind, *d, k8, rng) == s);
    }
  }
}

TEST_CASE("uniform destinations are flat and never the source") {
  Rng rng(7, 5, Rng::Purpose::Destination);
  const NodeId src = 5;
  std::vector<int> hist(64, 0);
  const int draws = 1'000'000;
  for (int i = 0; i < draws; ++i) {
    const auto d = dest_for(PatternKind::Uniform, src, k8, rng);
    REQUIRE(d.has_value());
    ++hist[static_cast<std::size_t>(*d)];
  }
  CHECK(hist[src] == 0);
  const double expect = draws / 63.0;
  double chi2 = 0.0;
  for (NodeId d = 0; d < 64; ++d)
    if (d != src) chi2 += (hist[d] - expect) * (hist[d] - expect) / expect;
  CHECK(chi2 < 90.80);  // chi-square 99% quantile, 62 degrees of freedom
}

TEST_CASE("injection probability") {
  CHECK(injection_probability(0.02, 4) == doctest::Approx(0.005));
  CHECK(injection_probability(0.0, 4) == 0.0);
  CHECK_THROWS_AS(injection_probability(1.0, 0), InputError);
  CHECK_THROWS_AS(injection_probability(2.0, 1), InputError);

  Rng never(1, 1, Rng::Purpose::Injection);
  for (int i = 0; i < 1000; ++i) CHECK_FALSE(should_inject(0.0, 4, never));

  Rng rng(3, 9, Rng::Purpose::Injection);
  const int n = 1'000'000;
  const double p = 0.005;
  int hits = 0;
  for (int i = 0; i < n; ++i) hits += should_inject(0.02, 4, rng);
  const double sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(hits - n * p) < 3 * sigma);
}

TEST_CASE("schedule phases are half-open and wrap") {
  TrafficSchedule s;
  s.phases = {{PatternKind::Transpose, 100000}, {PatternKind::BitReversal, 100000}};
  CHECK(active_pattern(s, 0) == PatternKind::Transpose);
  CHECK(active_pattern(s, 99999) == PatternKind::Transpose);
  CHECK(active_pattern(s, 100000) == PatternKind::BitReversal);
  CHECK(active_pattern(s, 199999) == PatternKind::BitReversal);
  CHECK(active_pattern(s, 200000) == PatternKind::Transpose);

  const TrafficSchedule d = default_interval_schedule();
  REQUIRE(d.phases.size() == 4);
  CHECK(d.phases[0].pattern == PatternKind::Transpose);
  CHECK(d.phases[3].pattern == PatternKind::Uniform);
  CHECK(active_pattern(d, 350000) == PatternKind::Uniform);
  CHECK(d.label() == "transpose+bit_reversal+butterfly+uniform");
}

TEST_CASE("schedule validation") {
  TrafficSchedule s;
  CHECK_NOTHROW(s.validate(k8));
  s.phases = {{PatternKind::Transpose, 10}};
  CHECK_THROWS_AS(s.validate(MeshConfig{4, 8}), InputError);
  s.phases = {{PatternKind::BitReversal, 10}};
  CHECK_THROWS_AS(s.validate(MeshConfig{6, 6}), InputError);
  s.phases = {};
  CHECK_THROWS_AS(s.validate(k8), InputError);
  s.phases = {{PatternKind::Uniform, 0}};
  CHECK_THROWS_AS(s.validate(k8), InputError);
  CHECK(parse_pattern("bit_reversal") == PatternKind::BitReversal);
  CHECK_THROWS_AS(parse_pattern("bitrev"), InputError);
}

TEST_CASE("random streams are independent per node and purpose") {
  Rng a(1, 0, Rng::Purpose::Injection), b(1, 1, Rng::Purpose::Injection),
      c(1, 0, Rng::Purpose::Destination), a2(1, 0, Rng::Purpose::Injection);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    same_ab += x == b.next_u64();
    same_ac += x == c.next_u64();
    CHECK(x == a2.next_u64());
  }
  CHECK(same_ab == 0);
  CHECK(same_ac == 0);
  Rng r(4, 2, Rng::Purpose::Destination);
  for (int i = 0; i < 10000; ++i) CHECK(r.next_below(7) < 7);
}
