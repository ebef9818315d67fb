#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "fedsynth/federation/federation.hpp"

namespace fedsynth {

// Frame: u32 payload_bytes (LE), then payload = u8 type + body. Parameter
// sets use the checkpoint encoding.

enum class MessageType : std::uint8_t { round_begin = 1, submit = 2, round_result = 3 };

/// Server to client: current global parameters, `generator.` and
/// `discriminator.` prefixed (the latter only when discriminators are shared).
struct RoundBegin {
  std::int64_t round_index = 0;
  ParameterSet global;
};

struct Submit {
  std::string client_id;
  std::uint64_t dataset_size = 0;
  ParameterSet generator;
  ParameterSet discriminator;
};

/// Aggregates; `discriminator` is empty when discriminators stay local.
struct RoundResult {
  ParameterSet generator;
  ParameterSet discriminator;
};

using Message = std::variant<RoundBegin, Submit, RoundResult>;

/// Full frame including the length prefix.
std::string encode_message(const Message& message);
/// Decodes a payload (the bytes after the length prefix).
Message decode_message(std::string_view payload);

/// Blocking framed messages over a connected stream socket or pipe. Does not
/// own the descriptor.
class StreamChannel {
 public:
  explicit StreamChannel(int fd) : fd_(fd) {}
  void send(const Message& message);
  Message receive();

 private:
  int fd_;
};

/// Server half of one round: broadcasts RoundBegin, waits for every Submit
/// (the barrier), aggregates and replies with RoundResult.
RoundRecord serve_round(std::span<StreamChannel* const> clients, std::int64_t round_index,
                        const ParameterSet& generator, const ParameterSet& discriminator,
                        const FederationOptions& options = {});

/// Client half: imports the global state, trains the round's local epochs,
/// submits, and imports the aggregate.
EpochStats client_round(StreamChannel& server, ClientState& client,
                        const FederationOptions& options = {});

}  // namespace fedsynth
