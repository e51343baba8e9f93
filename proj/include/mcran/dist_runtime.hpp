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

// Message-passing execution of the auction. Every cloud is an agent on its
// own thread holding only its reward row, weight row, capacity and latest
// bids. A single price token travels the ring 0 -> 1 -> ... -> C-1 -> 0;
// the holder runs one auction iteration and forwards the updated prices.
//
// The token also carries the number of consecutive quiet iterations, so the
// agent that completes the C-th one knows the auction has converged and
// hands the token to the coordinator instead of its successor.
//
// PriceMessage wire format (all integers and reals little-endian):
//
//   u32  payload length in bytes (everything after this field)
//   u64  t            iteration that produced these prices
//   u32  sender       cloud index, 0-based
//   u32  U            number of prices
//   f64  price[U]     IEEE-754 binary64
//   u32  quiet_hops   consecutive quiet iterations ending at t
//
// Decoders must reject a record whose payload length disagrees with U.

#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mcran/dcaa.hpp"
#include "mcran/instance.hpp"

namespace mcran {

struct PriceMessage {
  std::uint64_t t = 0;
  CloudIndex sender = 0;
  std::vector<double> prices;
  std::uint32_t quiet_hops = 0;

  friend bool operator==(const PriceMessage&, const PriceMessage&) = default;
};

namespace detail {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw InvalidInput("truncated price message");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(in[pos + i]) << (8 * i);
  pos += sizeof(T);
  return value;
}

}  // namespace detail

inline std::vector<std::uint8_t> encode(const PriceMessage& msg) {
  std::vector<std::uint8_t> out;
  const std::size_t payload = 8 + 4 + 4 + 8 * msg.prices.size() + 4;
  out.reserve(4 + payload);
  detail::put_le(out, static_cast<std::uint32_t>(payload));
  detail::put_le(out, msg.t);
  detail::put_le(out, static_cast<std::uint32_t>(msg.sender));
  detail::put_le(out, static_cast<std::uint32_t>(msg.prices.size()));
  for (double p : msg.prices) detail::put_le(out, std::bit_cast<std::uint64_t>(p));
  detail::put_le(out, msg.quiet_hops);
  return out;
}

inline PriceMessage decode(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const auto payload = detail::get_le<std::uint32_t>(bytes, pos);
  if (bytes.size() != 4 + static_cast<std::size_t>(payload))
    throw InvalidInput("price message length prefix does not match record size");
  PriceMessage msg;
  msg.t = detail::get_le<std::uint64_t>(bytes, pos);
  msg.sender = detail::get_le<std::uint32_t>(bytes, pos);
  const auto n = detail::get_le<std::uint32_t>(bytes, pos);
  if (payload != 8 + 4 + 4 + 8 * static_cast<std::size_t>(n) + 4)
    throw InvalidInput("price message payload length disagrees with U");
  msg.prices.resize(n);
  for (auto& p : msg.prices) {
    p = std::bit_cast<double>(detail::get_le<std::uint64_t>(bytes, pos));
    if (!(p >= 0.0)) throw InvalidInput("price message carries a negative or NaN price");
  }
  msg.quiet_hops = detail::get_le<std::uint32_t>(bytes, pos);
  return msg;
}

/// Read-only view of an instance that counts every row read made on behalf
/// of a cloud other than the row's owner.
class AuditedInstance {
 public:
  explicit AuditedInstance(const GapInstance& instance) : instance_(&instance) {}

  std::vector<double> rewards_row(CloudIndex reader, CloudIndex row) const {
    note(reader, row);
    return instance_->rewards().row(row);
  }
  std::vector<std::int64_t> weights_row(CloudIndex reader, CloudIndex row) const {
    note(reader, row);
    return instance_->weights().row(row);
  }
  std::int64_t capacity(CloudIndex reader, CloudIndex row) const {
    note(reader, row);
    return instance_->capacity(row);
  }

  std::size_t num_clouds() const { return instance_->num_clouds(); }
  std::size_t num_users() const { return instance_->num_users(); }
  std::uint64_t cross_reads() const { return cross_reads_.load(); }

 private:
  void note(CloudIndex reader, CloudIndex row) const {
    if (reader != row) ++cross_reads_;
  }

  const GapInstance* instance_;
  mutable std::atomic<std::uint64_t> cross_reads_{0};
};

class CloudAgent {
 public:
  CloudAgent(CloudIndex id, const AuditedInstance& view, AuctionOptions options)
      : id_(id),
        num_clouds_(view.num_clouds()),
        rewards_(view.rewards_row(id, id)),
        weights_(view.weights_row(id, id)),
        capacity_(view.capacity(id, id)),
        options_(options) {}

  /// One auction iteration on receipt of the token; returns the token to
  /// forward.
  PriceMessage on_message(const PriceMessage& in) {
    PriceMessage out;
    out.t = in.t + 1;
    out.sender = id_;
    out.prices = in.prices;
    auto rec = bid_locally(out.t, id_, num_clouds_, rewards_, weights_, capacity_, bids_,
                           out.prices, options_);
    out.quiet_hops = rec.quiet ? in.quiet_hops + 1 : 0;
    log_.push_back(std::move(rec));
    return out;
  }

  CloudIndex id() const noexcept { return id_; }
  const CloudBids& bids() const noexcept { return bids_; }
  const std::vector<StepRecord>& log() const noexcept { return log_; }

 private:
  CloudIndex id_;
  std::size_t num_clouds_;
  std::vector<double> rewards_;
  std::vector<std::int64_t> weights_;
  std::int64_t capacity_;
  AuctionOptions options_;
  CloudBids bids_;
  std::vector<StepRecord> log_;
};

struct FaultInjection {
  std::optional<std::uint64_t> drop_hop;  // 1-based hop whose message is lost
};

struct DistributedOptions {
  AuctionOptions auction;
  FaultInjection faults;
  std::chrono::milliseconds progress_timeout{2000};
};

struct DistributedResult {
  AuctionResult result;
  bool stalled = false;
  std::uint64_t hops = 0;         // agent-to-agent deliveries attempted
  std::uint64_t cross_reads = 0;  // must stay 0
  std::vector<StepRecord> trace;  // merged agent logs, ordered by t
};

namespace detail {

/// Single-slot mailbox; the ring never holds more than one token.
class Mailbox {
 public:
  void put(PriceMessage msg) {
    {
      std::lock_guard lock(mu_);
      slot_ = std::move(msg);
    }
    cv_.notify_one();
  }

  std::optional<PriceMessage> take() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return slot_.has_value() || closed_; });
    if (!slot_) return std::nullopt;
    auto msg = std::move(*slot_);
    slot_.reset();
    return msg;
  }

  void close() {
    {
      std::lock_guard lock(mu_);
      closed_ = true;
    }
    cv_.notify_all();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::optional<PriceMessage> slot_;
  bool closed_ = false;
};

}  // namespace detail

inline DistributedResult run_distributed(const GapInstance& instance,
                                         const DistributedOptions& options = {}) {
  if (options.auction.max_rounds < 1) throw InvalidInput("max_rounds must be >= 1");
  const std::size_t C = instance.num_clouds();
  const std::uint64_t cap = options.auction.max_rounds * C;
  AuditedInstance view(instance);

  std::vector<CloudAgent> agents;
  agents.reserve(C);
  for (CloudIndex c = 0; c < C; ++c) agents.emplace_back(c, view, options.auction);
  std::vector<detail::Mailbox> boxes(C);

  std::mutex mu;
  std::condition_variable cv;
  std::optional<PriceMessage> final_token;
  std::uint64_t hops = 0;
  bool lost = false;

  auto deliver = [&](CloudIndex to, PriceMessage msg) {
    bool drop = false;
    {
      std::lock_guard lock(mu);
      ++hops;
      drop = options.faults.drop_hop && hops == *options.faults.drop_hop;
      if (drop) lost = true;
    }
    cv.notify_all();
    if (!drop) boxes[to].put(std::move(msg));
  };

  std::vector<std::jthread> threads;
  threads.reserve(C);
  for (CloudIndex c = 0; c < C; ++c) {
    threads.emplace_back([&, c] {
      while (auto msg = boxes[c].take()) {
        auto out = agents[c].on_message(*msg);
        if (out.quiet_hops >= C || out.t >= cap) {
          {
            std::lock_guard lock(mu);
            final_token = std::move(out);
          }
          cv.notify_all();
          return;
        }
        deliver((c + 1) % C, std::move(out));
      }
    });
  }

  PriceMessage start;
  start.t = 0;
  start.sender = C - 1;
  start.prices.assign(instance.num_users(), 0.0);
  boxes[0].put(std::move(start));

  DistributedResult out;
  {
    std::unique_lock lock(mu);
    std::uint64_t seen = hops;
    while (!final_token && !lost) {
      if (!cv.wait_for(lock, options.progress_timeout,
                       [&] { return final_token || lost || hops != seen; })) {
        break;  // no progress within the timeout
      }
      seen = hops;
    }
    out.stalled = !final_token.has_value();
    out.hops = hops;
  }
  for (auto& box : boxes) box.close();
  threads.clear();  // joins

  out.cross_reads = view.cross_reads();
  for (const auto& agent : agents)
    out.trace.insert(out.trace.end(), agent.log().begin(), agent.log().end());
  std::sort(out.trace.begin(), out.trace.end(),
            [](const StepRecord& a, const StepRecord& b) { return a.t < b.t; });

  if (final_token) {
    std::vector<CloudBids> records;
    for (const auto& agent : agents) records.push_back(agent.bids());
    out.result.assignment = extract_assignment(records, final_token->prices);
    out.result.value = evaluate(instance, out.result.assignment).value;
    out.result.iterations = final_token->t;
    out.result.converged = final_token->quiet_hops >= C;
  } else {
    out.result.assignment = Assignment::unassigned(instance.num_users());
    out.result.iterations = out.trace.empty() ? 0 : out.trace.back().t;
  }
  out.result.gamma = approximation_ratio(options.auction.method);
  return out;
}

inline DistributedResult run_distributed(const GapInstance& instance, KnapsackMethod method,
                                         std::uint64_t max_rounds = 100) {
  DistributedOptions options;
  options.auction.method = method;
  options.auction.max_rounds = max_rounds;
  return run_distributed(instance, options);
}

/// Scalars moved over the ring: one price vector of length U per iteration.
constexpr std::uint64_t message_volume(std::uint64_t iterations, std::size_t num_users) {
  return iterations * static_cast<std::uint64_t>(num_users);
}

inline std::uint64_t message_volume(const DistributedResult& run, std::size_t num_users) {
  return message_volume(run.result.iterations, num_users);
}

}  // namespace mcran
