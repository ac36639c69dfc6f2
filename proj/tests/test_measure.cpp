#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "modularis/measure.hpp"
#include "support.hpp"

using namespace modularis;
using testsupport::make_rng;
using testsupport::random_partition;
using testsupport::random_refinement;
using testsupport::random_step;

namespace {

// Independent refinement oracle: a contiguous partition refines another iff
// the coarse breakpoint set is contained in the fine one.
bool breakpoints_contained(const Partition& coarse, const Partition& fine) {
  auto cb = coarse.breakpoints();
  auto fb = fine.breakpoints();
  for (double t : cb) {
    bool found = false;
    for (double s : fb)
      if (std::abs(s - t) <= kBreakTol) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

// Independent common-refinement oracle: sorted union of breakpoints.
std::vector<double> breakpoint_union(const Partition& a, const Partition& b) {
  auto pa = a.breakpoints();
  auto pb = b.breakpoints();
  pa.insert(pa.end(), pb.begin(), pb.end());
  std::sort(pa.begin(), pa.end());
  std::vector<double> out;
  for (double t : pa)
    if (out.empty() || t - out.back() > kBreakTol) out.push_back(t);
  return out;
}

bool set_contains(const MeasurableSet& s, double t) {
  for (const auto& b : s.blocks)
    if (b.contains(t)) return true;
  return false;
}

}  // namespace

TEST_CASE("canonicalize merges equal neighbours") {
  StepFunction f = step_from_blocks({{0.0, 1.0}, {1.0, 2.0}}, {{2.0}, {2.0}}, 1);
  REQUIRE(f.partition.size() == 1);
  CHECK(f.partition.blocks[0].start == 0.0);
  CHECK(f.partition.blocks[0].end == 2.0);
  CHECK(f.values[0][0] == 2.0);
}

TEST_CASE("canonicalize of the empty function is the zero function") {
  StepFunction f;
  f.dim = 1;
  auto g = canonicalize(f);
  CHECK(g.partition.size() == 0);
  CHECK(g.is_zero());
  CHECK(g.sup_norm() == 0.0);
}

TEST_CASE("canonicalize rejects overlapping blocks") {
  StepFunction f;
  f.partition.blocks = {{0.0, 1.0}, {0.5, 1.5}};
  f.values = {{1.0}, {1.0}};
  f.dim = 1;
  CHECK_THROWS_WITH_AS(canonicalize(f), doctest::Contains("overlap"),
                       DomainError);
  try {
    canonicalize(f);
  } catch (const DomainError& e) {
    CHECK(e.code() == "malformed-input");
  }
}

TEST_CASE("canonicalize fills gaps with zero blocks") {
  StepFunction f = step_from_blocks({{1.0, 2.0}}, {{3.0}}, 1);
  REQUIRE(f.partition.size() == 2);
  CHECK(f.partition.blocks[0].start == 0.0);
  CHECK(f.partition.blocks[0].end == 1.0);
  CHECK(f.values[0][0] == 0.0);
  CHECK(f.values[1][0] == 3.0);
}

TEST_CASE("canonicalize drops measure-zero slivers and is idempotent") {
  StepFunction f;
  f.partition.blocks = {{0.0, 1.0}, {1.0, 1.0 + 1e-13}, {1.0 + 1e-13, 2.0}};
  f.values = {{1.0}, {7.0}, {2.0}};
  f.dim = 1;
  auto g = canonicalize(f);
  CHECK(g.partition.size() == 2);

  auto rng = make_rng(101);
  for (int i = 0; i < 50; ++i) {
    auto h = random_step(rng);
    auto hh = canonicalize(h);
    CHECK(equal_ae(h, hh));
    CHECK(hh.partition.extent() == h.partition.extent());
  }
}

TEST_CASE("is_refinement matches the breakpoint containment oracle") {
  Partition two = partition_from_breakpoints(std::vector<double>{0, 1, 2});
  Partition one = partition_from_breakpoints(std::vector<double>{0, 2});
  Partition skew = partition_from_breakpoints(std::vector<double>{0, 1.5, 2});
  CHECK(is_refinement(one, two));
  CHECK_FALSE(is_refinement(skew, two));

  Partition three = partition_from_breakpoints(std::vector<double>{0, 3});
  CHECK_THROWS_AS(is_refinement(one, three), DomainError);
  try {
    is_refinement(one, three);
  } catch (const DomainError& e) {
    CHECK(e.code() == "incomparable-domains");
  }

  auto rng = make_rng(202);
  for (int i = 0; i < 100; ++i) {
    auto base = random_partition(rng);
    auto fine = random_refinement(rng, base);
    CHECK(is_refinement(base, fine) == breakpoints_contained(base, fine));
    CHECK(is_refinement(base, fine));
    // reversed argument order can only hold when the split was trivial
    CHECK(is_refinement(fine, base) == breakpoints_contained(fine, base));
  }
}

TEST_CASE("common_refinement equals the sorted breakpoint union") {
  Partition one = partition_from_breakpoints(std::vector<double>{0, 2});
  Partition two = partition_from_breakpoints(std::vector<double>{0, 1, 2});
  auto r = common_refinement(one, two);
  REQUIRE(r.size() == 2);
  CHECK(r.blocks[0].end == 1.0);

  Partition a = partition_from_breakpoints(std::vector<double>{0, 1, 2});
  Partition b = partition_from_breakpoints(std::vector<double>{0, 0.5, 2});
  auto m = common_refinement(a, b);
  REQUIRE(m.size() == 3);
  CHECK(m.blocks[0].end == 0.5);
  CHECK(m.blocks[1].end == 1.0);

  Partition c = partition_from_breakpoints(std::vector<double>{0, 3});
  CHECK_THROWS_AS(common_refinement(a, c), DomainError);

  auto rng = make_rng(303);
  for (int i = 0; i < 100; ++i) {
    auto p = random_partition(rng);
    auto q = random_refinement(rng, p);
    auto cr = common_refinement(p, q);
    auto expect = breakpoint_union(p, q);
    REQUIRE(cr.size() + 1 == expect.size());
    for (std::size_t j = 0; j < cr.size(); ++j) {
      CHECK(cr.blocks[j].start == doctest::Approx(expect[j]).epsilon(1e-14));
      CHECK(cr.blocks[j].end == doctest::Approx(expect[j + 1]).epsilon(1e-14));
    }
    CHECK(is_refinement(p, cr));
    CHECK(is_refinement(q, cr));
  }
}

TEST_CASE("refinement_chain stages refine every earlier input") {
  auto rng = make_rng(404);
  for (int i = 0; i < 30; ++i) {
    // all stages share one extent, as intersections would otherwise vanish
    auto base = random_partition(rng);
    std::vector<Partition> stages{base};
    for (int s = 0; s < 3; ++s) {
      Partition p = random_refinement(rng, base, 0.4);
      stages.push_back(p);
    }
    auto chain = refinement_chain(stages);
    REQUIRE(chain.size() == stages.size());
    for (std::size_t j = 0; j < chain.size(); ++j) {
      for (std::size_t k = 0; k <= j; ++k) {
        CHECK(is_refinement(stages[k], chain[j]));
        CHECK(is_refinement(chain[k], chain[j]));
      }
    }
  }
}

TEST_CASE("egorov witness on the shrinking indicator family") {
  std::vector<StepFunction> fs;
  for (int n = 1; n <= 50; ++n) fs.push_back(step_indicator(0.0, 1.0 / n, 1.0));
  StepFunction limit;  // zero
  auto w = egorov_uniform_set(fs, limit, 0.1, 0.5);
  CHECK(w.first_index == 11);
  REQUIRE(w.exceptional.blocks.size() == 1);
  CHECK(w.exceptional.blocks[0].start == 0.0);
  CHECK(w.exceptional.blocks[0].end == doctest::Approx(1.0 / 11).epsilon(1e-12));
  CHECK(w.exceptional.measure() < 0.1);
}

TEST_CASE("egorov on a constant sequence returns the empty set") {
  auto rng = make_rng(505);
  auto g = random_step(rng);
  std::vector<StepFunction> fs{g, g, g};
  auto w = egorov_uniform_set(fs, g, 0.25, 1e-9);
  CHECK(w.first_index == 1);
  CHECK(w.exceptional.blocks.empty());
}

TEST_CASE("egorov reports no witness when deviation cannot be confined") {
  std::vector<StepFunction> fs(5, step_indicator(0.0, 1.0, 1.0));
  StepFunction limit;
  CHECK_THROWS_AS(egorov_uniform_set(fs, limit, 0.5, 0.5), DomainError);
  try {
    egorov_uniform_set(fs, limit, 0.5, 0.5);
  } catch (const DomainError& e) {
    CHECK(e.code() == "no-witness");
  }
}

TEST_CASE("egorov postcondition re-verified by sampling") {
  auto rng = make_rng(606);
  for (int trial = 0; trial < 20; ++trial) {
    auto limit = random_step(rng, 4);
    std::vector<StepFunction> fs;
    // perturb the limit by shrinking-support bumps
    for (int n = 1; n <= 12; ++n) {
      auto bump = step_indicator(0.0, 1.0 / (n + 1), 2.0);
      fs.push_back(add(limit, bump));
    }
    UniformitySet w;
    try {
      w = egorov_uniform_set(fs, limit, 0.3, 0.25);
    } catch (const DomainError&) {
      continue;  // no witness for this draw is a legal outcome
    }
    CHECK(w.exceptional.measure() < 0.3);
    for (std::size_t n = w.first_index - 1; n < fs.size(); ++n) {
      auto dev = pointwise_norm(sub(fs[n], limit));
      for (const auto& b : dev.partition.blocks) {
        double mid = (b.start + b.end) / 2.0;
        if (!set_contains(w.exceptional, mid))
          CHECK(vector_norm(dev.value_at(mid), dev.value_norm) <= 0.25 + 1e-12);
      }
    }
  }
}

TEST_CASE("arithmetic on mismatched value ingredients is rejected") {
  auto f = step_indicator(0, 1, 1.0);
  StepFunction g;
  g.partition.blocks = {{0.0, 1.0}};
  g.values = {{1.0, 2.0}};
  g.dim = 2;
  CHECK_THROWS_AS(sub(f, g), DomainError);
}

TEST_CASE("sup_diff sees through different partitions") {
  auto f = step_from_blocks({{0.0, 1.0}, {1.0, 2.0}}, {{1.0}, {3.0}}, 1);
  auto g = step_from_blocks({{0.0, 0.5}, {0.5, 2.0}}, {{1.0}, {1.0}}, 1);
  CHECK(sup_diff(f, g) == 2.0);
  CHECK(sup_diff(f, f) == 0.0);
}
