// Copyright 2026 The mcran Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <chrono>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "mcran/dist_runtime.hpp"
#include "mcran/experiments.hpp"
#include "oracles.hpp"

namespace mcran {
namespace {

using testing::instance_i1;
using testing::instance_p1;

void expect_same_as_centralized(const GapInstance& inst, AuctionOptions options) {
  const auto central = run_traced(inst, options);
  DistributedOptions dist;
  dist.auction = options;
  const auto out = run_distributed(inst, dist);
  EXPECT_FALSE(out.stalled);
  EXPECT_EQ(out.cross_reads, 0u);
  EXPECT_EQ(out.result, central.result);
  EXPECT_EQ(out.trace, central.trace);
}

TEST(DistributedTest, MatchesCentralizedOnSmallExamples) {
  expect_same_as_centralized(instance_i1(), {});
  expect_same_as_centralized(instance_p1(), {});
  const auto out = run_distributed(instance_i1(), KnapsackMethod::kExact);
  EXPECT_EQ(out.result.value, 12.0);
  EXPECT_EQ(out.result.iterations, 4u);
  EXPECT_TRUE(out.result.converged);
}

TEST(DistributedTest, SingleCloudPassesTokenToItself) {
  const auto inst = GapInstance::unit_weight(Matrix<double>{{3.0, 1.0, 2.0}}, 2);
  expect_same_as_centralized(inst, {});
  EXPECT_EQ(run_distributed(inst, KnapsackMethod::kExact).result.value, 5.0);
}

TEST(DistributedTest, RoundCapStopsBothSidesAtTheSameStep) {
  AuctionOptions options;
  options.max_rounds = 1;
  expect_same_as_centralized(instance_i1(), options);
  const auto out = run_distributed(instance_i1(), KnapsackMethod::kExact, 1);
  EXPECT_EQ(out.result.iterations, 2u);
  EXPECT_FALSE(out.result.converged);
}

TEST(DistributedTest, RandomInstancesMatchCentralized) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 60; ++i) {
    const auto inst = random_small_instance(rng);
    AuctionOptions options;
    options.method = i % 2 ? KnapsackMethod::kGreedy : KnapsackMethod::kExact;
    SCOPED_TRACE(i);
    expect_same_as_centralized(inst, options);
  }
}

TEST(DistributedTest, TokenVisitsCloudsInRingOrder) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto inst = random_small_instance(rng);
    const auto out = run_distributed(inst, KnapsackMethod::kExact);
    ASSERT_FALSE(out.trace.empty());
    for (std::size_t k = 0; k < out.trace.size(); ++k) {
      EXPECT_EQ(out.trace[k].t, k + 1);
      EXPECT_EQ(out.trace[k].cloud, active_cloud(k + 1, inst.num_clouds()));
    }
    EXPECT_EQ(out.hops + 1, out.trace.size());
  }
}

TEST(DistributedTest, LostMessageIsReportedAsStall) {
  DistributedOptions options;
  options.faults.drop_hop = 1;
  options.progress_timeout = std::chrono::milliseconds(200);
  const auto out = run_distributed(instance_i1(), options);
  EXPECT_TRUE(out.stalled);
  EXPECT_FALSE(out.result.converged);
  EXPECT_EQ(out.hops, 1u);
  EXPECT_EQ(out.trace.size(), 1u);
  EXPECT_EQ(out.result.assignment, Assignment::unassigned(3));

  options.faults.drop_hop = 3;
  const auto later = run_distributed(instance_i1(), options);
  EXPECT_TRUE(later.stalled);
  EXPECT_EQ(later.trace.size(), 3u);
}

TEST(DistributedTest, RejectsZeroRounds) {
  DistributedOptions options;
  options.auction.max_rounds = 0;
  EXPECT_THROW(run_distributed(instance_i1(), options), InvalidInput);
}

TEST(AuditTest, CountsOnlyForeignRows) {
  const auto inst = instance_i1();
  AuditedInstance view(inst);
  view.rewards_row(0, 0);
  view.capacity(1, 1);
  EXPECT_EQ(view.cross_reads(), 0u);
  view.weights_row(0, 1);
  EXPECT_EQ(view.cross_reads(), 1u);
}

TEST(MessageVolumeTest, OnePriceVectorPerIteration) {
  EXPECT_EQ(message_volume(4, 3), 12u);
  EXPECT_EQ(message_volume(run_distributed(instance_i1(), KnapsackMethod::kExact), 3), 12u);
  EXPECT_EQ(message_volume(5, 2), 10u);
  EXPECT_EQ(message_volume(7, 56), 2 * message_volume(7, 28));
  EXPECT_EQ(message_volume(0, 9), 0u);
}

TEST(WireTest, RoundTripIsBitExact) {
  PriceMessage msg{42, 5, {0.0, 1.5, 6.02214076e23, 5e-324}, 3};
  const auto bytes = encode(msg);
  EXPECT_EQ(bytes.size(), 4u + 8 + 4 + 4 + 8 * 4 + 4);
  EXPECT_EQ(bytes[0], bytes.size() - 4);
  EXPECT_EQ(bytes[4], 42);
  EXPECT_EQ(bytes[12], 5);
  EXPECT_EQ(decode(bytes), msg);

  const PriceMessage empty{0, 0, {}, 0};
  EXPECT_EQ(decode(encode(empty)), empty);
}

TEST(WireTest, RejectsMalformedRecords) {
  const auto good = encode(PriceMessage{1, 0, {1.0, 2.0}, 0});

  auto truncated = good;
  truncated.pop_back();
  EXPECT_THROW(decode(truncated), InvalidInput);

  auto padded = good;
  padded.push_back(0);
  EXPECT_THROW(decode(padded), InvalidInput);

  // Claims three prices while carrying two; the prefix still matches the size.
  auto wrong_count = good;
  wrong_count[16] = 3;
  EXPECT_THROW(decode(wrong_count), InvalidInput);

  EXPECT_THROW(decode(encode(PriceMessage{1, 0, {-1.0}, 0})), InvalidInput);
  EXPECT_THROW(decode(encode(PriceMessage{1, 0, {std::nan("")}, 0})), InvalidInput);
  EXPECT_THROW(decode(std::vector<std::uint8_t>{1, 0}), InvalidInput);
}

}  // namespace
}  // namespace mcran
