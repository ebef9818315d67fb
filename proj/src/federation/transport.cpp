#include "fedsynth/federation/transport.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "fedsynth/models/checkpoint.hpp"

namespace fedsynth {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_uint(std::string_view bytes, std::size_t& offset, int width) {
  if (offset + width > bytes.size()) throw ValidationError("truncated message");
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  offset += width;
  return v;
}

void put_set(std::string& out, const ParameterSet& set) { out += encode_parameter_set(set); }

}  // namespace

std::string encode_message(const Message& message) {
  std::string body;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, RoundBegin>) {
          body.push_back(static_cast<char>(MessageType::round_begin));
          put_u64(body, static_cast<std::uint64_t>(m.round_index));
          put_set(body, m.global);
        } else if constexpr (std::is_same_v<T, Submit>) {
          body.push_back(static_cast<char>(MessageType::submit));
          put_u32(body, static_cast<std::uint32_t>(m.client_id.size()));
          body += m.client_id;
          put_u64(body, m.dataset_size);
          put_set(body, m.generator);
          put_set(body, m.discriminator);
        } else {
          body.push_back(static_cast<char>(MessageType::round_result));
          put_set(body, m.generator);
          put_set(body, m.discriminator);
        }
      },
      message);
  if (body.size() > 0xffffffffu) throw ValidationError("message exceeds 4 GiB frame limit");
  std::string frame;
  put_u32(frame, static_cast<std::uint32_t>(body.size()));
  return frame + body;
}

Message decode_message(std::string_view payload) {
  std::size_t offset = 0;
  const auto type = static_cast<MessageType>(get_uint(payload, offset, 1));
  Message out;
  switch (type) {
    case MessageType::round_begin: {
      RoundBegin m;
      m.round_index = static_cast<std::int64_t>(get_uint(payload, offset, 8));
      m.global = decode_parameter_set(payload, offset);
      out = std::move(m);
      break;
    }
    case MessageType::submit: {
      Submit m;
      const auto n = get_uint(payload, offset, 4);
      if (offset + n > payload.size()) throw ValidationError("truncated client id");
      m.client_id.assign(payload.substr(offset, n));
      offset += n;
      m.dataset_size = get_uint(payload, offset, 8);
      m.generator = decode_parameter_set(payload, offset);
      m.discriminator = decode_parameter_set(payload, offset);
      out = std::move(m);
      break;
    }
    case MessageType::round_result: {
      RoundResult m;
      m.generator = decode_parameter_set(payload, offset);
      m.discriminator = decode_parameter_set(payload, offset);
      out = std::move(m);
      break;
    }
    default:
      throw ValidationError("unknown message type " + std::to_string(static_cast<int>(type)));
  }
  if (offset != payload.size()) throw ValidationError("trailing bytes after message");
  return out;
}

void StreamChannel::send(const Message& message) {
  const std::string frame = encode_message(message);
  std::size_t done = 0;
  while (done < frame.size()) {
    const ssize_t n = ::write(fd_, frame.data() + done, frame.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw std::runtime_error(std::string("send failed: ") + std::strerror(errno));
    done += static_cast<std::size_t>(n);
  }
}

namespace {

void read_exact(int fd, char* into, std::size_t size) {
  std::size_t done = 0;
  while (done < size) {
    const ssize_t n = ::read(fd, into + done, size - done);
    if (n < 0 && errno == EINTR) continue;
    if (n < 0) throw std::runtime_error(std::string("receive failed: ") + std::strerror(errno));
    if (n == 0) throw std::runtime_error("peer closed the connection");
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

Message StreamChannel::receive() {
  char header[4];
  read_exact(fd_, header, sizeof header);
  std::size_t offset = 0;
  const auto size = get_uint(std::string_view(header, 4), offset, 4);
  std::string payload(size, '\0');
  read_exact(fd_, payload.data(), payload.size());
  return decode_message(payload);
}

namespace {

template <typename T>
T expect(Message message, const char* what) {
  if (auto* m = std::get_if<T>(&message)) return std::move(*m);
  throw ValidationError(std::string("protocol error: expected ") + what);
}

}  // namespace

RoundRecord serve_round(std::span<StreamChannel* const> clients, std::int64_t round_index,
                        const ParameterSet& generator, const ParameterSet& discriminator,
                        const FederationOptions& options) {
  if (clients.empty()) throw ValidationError("serve_round: no clients");
  ParameterSet global = generator.with_prefix("generator.");
  if (options.aggregate_discriminator) {
    global = global.merged(discriminator.with_prefix("discriminator."));
  }
  for (auto* c : clients) c->send(RoundBegin{round_index, global});

  RoundRecord record;
  record.round_index = round_index;
  std::vector<ParameterSet> generators;
  std::vector<ParameterSet> discriminators;
  std::vector<std::size_t> sizes;
  for (auto* c : clients) {
    auto submit = expect<Submit>(c->receive(), "SUBMIT");
    submit.generator.require_compatible(generator);
    record.client_ids.push_back(submit.client_id);
    record.client_hashes.push_back(parameter_hash(submit.generator));
    sizes.push_back(static_cast<std::size_t>(submit.dataset_size));
    generators.push_back(std::move(submit.generator));
    if (options.aggregate_discriminator) discriminators.push_back(std::move(submit.discriminator));
  }
  record.weights = aggregation_weights(sizes, options.weighting);
  record.aggregated_generator = fedgan_aggregate(generators, record.weights);
  if (options.aggregate_discriminator) {
    record.aggregated_discriminator = fedgan_aggregate(discriminators, record.weights);
  }
  record.aggregate_hash = parameter_hash(record.aggregated_generator);
  for (auto* c : clients) {
    c->send(RoundResult{record.aggregated_generator, record.aggregated_discriminator});
  }
  return record;
}

EpochStats client_round(StreamChannel& server, ClientState& client,
                        const FederationOptions& options) {
  const auto begin = expect<RoundBegin>(server.receive(), "ROUND_BEGIN");
  client.model.generator.import_parameters(begin.global.with_prefix_stripped("generator."));
  if (options.aggregate_discriminator) {
    client.model.discriminator.import_parameters(
        begin.global.with_prefix_stripped("discriminator."));
  }
  EpochStats last;
  const std::int64_t first = begin.round_index * options.local_epochs;
  for (std::int64_t e = first; e < first + options.local_epochs; ++e) {
    last = train_local_epoch(client.model, client.dataset, e);
  }
  server.send(Submit{client.client_id, client.dataset_size(),
                     client.model.generator.export_parameters(),
                     client.model.discriminator.export_parameters()});
  const auto result = expect<RoundResult>(server.receive(), "ROUND_RESULT");
  client.model.generator.import_parameters(result.generator);
  if (options.aggregate_discriminator) client.model.discriminator.import_parameters(result.discriminator);
  return last;
}

}  // namespace fedsynth
