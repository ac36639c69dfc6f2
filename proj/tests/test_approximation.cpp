#include <cmath>

#include "doctest.h"
#include "modularis/approximation.hpp"
#include "support.hpp"

using namespace modularis;
using testsupport::make_rng;
using testsupport::random_partition;
using testsupport::random_refinement;
using testsupport::random_step;

namespace {

MeasureSpace unit_line() {
  MeasureSpace space;
  space.alpha = kInf;
  space.exhaustion = {1.0, 2.0, 4.0, 8.0};
  return space;
}

FNormSpec l1_max_spec() {
  return make_fnorm_spec({lp_modular(1.0)}, max_binder(2));
}

}  // namespace

TEST_CASE("domain truncation clips at the exhaustion cutoff") {
  auto space = unit_line();
  auto f = step_from_blocks({{0.0, 3.0}}, {{5.0}}, 1);
  auto t2 = domain_truncate(f, space, 2);
  CHECK(t2.extent() == 2.0);
  CHECK(t2.value_at(1.5)[0] == 5.0);
  CHECK(t2.value_at(2.5)[0] == 0.0);

  auto t4 = domain_truncate(f, space, 4);
  CHECK(equal_ae(t4, f));

  CHECK_THROWS_AS(domain_truncate(f, space, 0), DomainError);
  CHECK_THROWS_AS(domain_truncate(f, space, 5), DomainError);
}

TEST_CASE("radial projection rescales long vectors only") {
  StepFunction f;
  f.partition.blocks = {{0.0, 1.0}, {1.0, 2.0}};
  f.values = {{3.0, 4.0}, {0.3, 0.4}};
  f.dim = 2;
  f = canonicalize(f);
  auto g = radial_project(f, 1.0);
  CHECK(g.values[0][0] == 0.6);
  CHECK(g.values[0][1] == 0.8);
  CHECK(g.values[1][0] == 0.3);
  CHECK(g.values[1][1] == 0.4);
  CHECK(g.sup_norm() <= 1.0 + 1e-15);

  CHECK_THROWS_AS(radial_project(f, 0.0), DomainError);
}

TEST_CASE("radial projection is pointwise 2-Lipschitz") {
  auto rng = make_rng(1717);
  for (int i = 0; i < 60; ++i) {
    auto f = random_step(rng, 5, 2);
    auto g = random_step(rng, 5, 2);
    double a = 0.25 + testsupport::dyadic(rng, 1, 16, 8);
    double lhs = sup_diff(radial_project(f, a), radial_project(g, a));
    double rhs = 2.0 * sup_diff(f, g);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("partition averaging matches the worked example") {
  auto f = step_from_blocks({{0.0, 1.0}, {1.0, 2.0}}, {{1.0}, {3.0}}, 1);
  Partition K;
  K.blocks = {{0.0, 2.0}};
  auto avg = partition_average(f, K);
  REQUIRE(avg.partition.size() == 1);
  CHECK(avg.values[0][0] == 2.0);
}

TEST_CASE("partition averaging reproduces coarse functions exactly") {
  auto rng = make_rng(1818);
  for (int i = 0; i < 50; ++i) {
    auto f = random_step(rng, 5);
    auto fine = random_refinement(rng, f.partition);
    auto avg = partition_average(f, fine);
    CHECK(equal_ae(avg, f));
    // machine equality of the block values, not just closeness
    auto cf = canonicalize(f);
    for (std::size_t b = 0; b < cf.partition.blocks.size(); ++b) {
      double mid =
          (cf.partition.blocks[b].start + cf.partition.blocks[b].end) / 2.0;
      CHECK(avg.value_at(mid) == cf.values[b]);
    }
  }
}

TEST_CASE("partition averaging rejects escaping support") {
  auto f = step_from_blocks({{0.0, 3.0}}, {{1.0}}, 1);
  Partition K;
  K.blocks = {{0.0, 2.0}};
  CHECK_THROWS_AS(partition_average(f, K), DomainError);
  try {
    partition_average(f, K);
  } catch (const DomainError& e) {
    CHECK(e.code() == "domain-mismatch");
  }
}

TEST_CASE("partition averaging preserves blockwise integrals") {
  auto rng = make_rng(1919);
  for (int i = 0; i < 40; ++i) {
    // power-of-two block measures keep the divisions exact
    int levels = std::uniform_int_distribution<int>(1, 4)(rng);
    auto K = uniform_partition(4.0, 1 << levels);
    auto fine = random_refinement(rng, K);
    std::vector<std::vector<double>> vals;
    for (std::size_t b = 0; b < fine.size(); ++b)
      vals.push_back(testsupport::random_value(rng, 1));
    auto f = step_from_blocks(fine.blocks, vals, 1);
    auto avg = partition_average(f, K);
    for (const auto& blk : K.blocks) {
      double int_f = 0.0, int_avg = 0.0;
      auto cf = canonicalize(f);
      for (std::size_t b = 0; b < cf.partition.blocks.size(); ++b) {
        const auto& fb = cf.partition.blocks[b];
        double lo = std::max(fb.start, blk.start);
        double hi = std::min(fb.end, blk.end);
        if (hi > lo) int_f += cf.values[b][0] * (hi - lo);
      }
      for (std::size_t b = 0; b < avg.partition.blocks.size(); ++b) {
        const auto& ab = avg.partition.blocks[b];
        double lo = std::max(ab.start, blk.start);
        double hi = std::min(ab.end, blk.end);
        if (hi > lo) int_avg += avg.values[b][0] * (hi - lo);
      }
      CHECK(int_f == doctest::Approx(int_avg).epsilon(1e-13));
    }
  }
}

TEST_CASE("partition averaging is linear") {
  auto rng = make_rng(2020);
  for (int i = 0; i < 30; ++i) {
    // power-of-two block measures keep every division exact
    auto K = uniform_partition(4.0, 1 << (i % 3));
    auto grid = random_refinement(rng, K);
    std::vector<std::vector<double>> va, vb;
    for (std::size_t b = 0; b < grid.size(); ++b) {
      va.push_back(testsupport::random_value(rng, 1));
      vb.push_back(testsupport::random_value(rng, 1));
    }
    auto f = step_from_blocks(grid.blocks, va, 1);
    auto g = step_from_blocks(grid.blocks, vb, 1);
    // powers of two scale exactly
    auto lhs = partition_average(add(scale(f, 2.0), scale(g, -0.5)), K);
    auto rhs = add(scale(partition_average(f, K), 2.0),
                   scale(partition_average(g, K), -0.5));
    CHECK(equal_ae(lhs, rhs));
  }
}

TEST_CASE("partition averaging never increases the sup bound") {
  auto rng = make_rng(2121);
  for (int i = 0; i < 40; ++i) {
    auto f = random_step(rng, 6);
    auto K = partition_from_breakpoints(std::vector<double>{0.0, f.extent()});
    if (f.extent() == 0.0) continue;
    auto avg = partition_average(f, K);
    CHECK(avg.sup_norm() <= f.sup_norm() + 1e-12);
  }
}

TEST_CASE("bounded simple approximation keeps or rescales blockwise") {
  StepFunction f;
  f.partition.blocks = {{0.0, 1.0}, {1.0, 2.0}};
  f.values = {{3.0, 4.0}, {0.5, 0.5}};
  f.dim = 2;
  f = canonicalize(f);
  auto g = bounded_simple_approx(f, 1.0);
  // |(3,4)| = 5 > 4 rescales to length 2, the short value passes through
  CHECK(g.values[0][0] == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(g.values[0][1] == doctest::Approx(1.6).epsilon(1e-15));
  CHECK(g.values[1][0] == 0.5);
  CHECK(g.sup_norm() <= 4.0 + 1e-12);

  auto h = bounded_simple_approx(f, 2.0);  // 5 <= 8 passes through
  CHECK(equal_ae(h, f));
  CHECK_THROWS_AS(bounded_simple_approx(f, 0.0), DomainError);
}

TEST_CASE("pipeline certification on a small family") {
  auto space = unit_line();
  auto norm = l1_max_spec();
  auto rng = make_rng(2222);
  std::vector<StepFunction> Z;
  for (int i = 0; i < 5; ++i) Z.push_back(random_step(rng, 5));
  auto pipe = build_admissible_map(Z, 0.05, norm, space);
  CHECK(pipe.report.total_error < 0.05);
  CHECK(pipe.report.truncation_error < 0.05 / 3);
  CHECK(pipe.report.radial_error < 0.05 / 3);
  CHECK(pipe.report.averaging_error < 0.05 / 3);

  // re-verify the certificate independently
  double worst = 0.0;
  for (const auto& f : Z)
    worst = std::max(worst, fnorm(norm, sub(f, apply_pipeline(pipe, space, f))));
  CHECK(std::abs(worst - pipe.report.total_error) <= 1e-12);
}

TEST_CASE("pipeline reproduces members on the default partition") {
  auto space = unit_line();
  auto norm = l1_max_spec();
  auto rng = make_rng(2323);
  // members already supported inside the first exhaustion prefix
  std::vector<StepFunction> Z;
  for (int i = 0; i < 4; ++i) {
    auto f = random_step(rng, 4, 1, VectorNorm::euclidean, 1.0);
    Z.push_back(f);
  }
  auto pipe = build_admissible_map(Z, 1e-6, norm, space);
  for (const auto& f : Z)
    CHECK(equal_ae(apply_pipeline(pipe, space, f), canonicalize(f)));
  CHECK(pipe.report.total_error == 0.0);
}

TEST_CASE("pipeline block-count cap certifies a coarser partition") {
  auto space = unit_line();
  auto norm = l1_max_spec();
  // a gentle two-valued member is approximable on few blocks
  std::vector<StepFunction> Z{
      step_from_blocks({{0.0, 0.5}, {0.5, 1.0}}, {{1.0}, {1.0 + 1.0 / 64}},
                       1)};
  PipelineOptions opts;
  opts.max_blocks = 1;
  auto pipe = build_admissible_map(Z, 0.3, norm, space, opts);
  CHECK(static_cast<int>(pipe.averaging.size()) <= 1);
  CHECK(pipe.report.total_error < 0.3);
}

TEST_CASE("pipeline exhausts its budget on stubborn inputs") {
  auto space = unit_line();
  auto norm = l1_max_spec();
  // support sticks out past the last exhaustion cutoff by a unit mass
  std::vector<StepFunction> Z{step_indicator(7.5, 9.5, 3.0)};
  CHECK_THROWS_AS(build_admissible_map(Z, 1e-3, norm, space), DomainError);
  try {
    build_admissible_map(Z, 1e-3, norm, space);
  } catch (const DomainError& e) {
    CHECK(e.code() == "budget-exhausted");
  }
}

TEST_CASE("user radius is honored and measured") {
  auto space = unit_line();
  auto norm = l1_max_spec();
  std::vector<StepFunction> Z{step_indicator(0.0, 1.0, 2.0)};
  PipelineOptions opts;
  opts.radius = 1.0;
  // radial stage now moves the member by |2 - 1| on measure one
  auto pipe = build_admissible_map(Z, 3.5, norm, space, opts);
  CHECK(pipe.radius == 1.0);
  CHECK(pipe.report.radial_error > 0.0);
  CHECK(pipe.report.total_error < 3.5);
}
