#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>

#include <nlohmann/json.hpp>

#include "vislint/backend.hpp"

namespace vislint {

enum class DecodeMode { server_default, sampling };

std::string_view to_string(DecodeMode m);
DecodeMode decode_mode_from_name(std::string_view name);

inline constexpr int kMaxRetriesLimit = 5;
inline constexpr const char* kApiKeyEnv = "VISLINT_API_KEY";

struct ModelConfig {
  // Base URL up to and including any version prefix, e.g. "http://localhost:8000/v1".
  std::string endpoint_url;
  std::string model_name;
  std::optional<std::string> api_key;
  double temperature = 1.0;
  double top_p = 1.0;
  int max_tokens = 512;
  std::chrono::seconds timeout{120};
  int max_retries = 3;
  // First retry waits this long; each further retry doubles it.
  std::chrono::milliseconds retry_backoff{500};
  DecodeMode decode_mode = DecodeMode::server_default;

  // Throws PreconditionError when an invariant does not hold.
  void validate() const;
};

// Fills api_key from VISLINT_API_KEY unless one is already set.
void apply_api_key_env(ModelConfig& config);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws PreconditionError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// "data:image/<type>;base64,<payload>"
std::string encode_image(const ImagePayload& image);

// Chat-completions request body. Identical inputs give identical bytes.
nlohmann::json build_request_body(const ModelConfig& config, std::span<const ChatMessage> messages);

// Assistant text of a chat-completions response. Throws ProtocolError.
std::string parse_completion(std::string_view body);

// Talks to an OpenAI-compatible server. Each call opens its own connection, so
// one client can serve many threads.
class LiveClient final : public ChatBackend {
public:
  explicit LiveClient(ModelConfig config);

  std::string complete(std::span<const ChatMessage> messages, const CallKey& key) override;
  std::string complete(std::span<const ChatMessage> messages);

  const ModelConfig& config() const { return config_; }

private:
  ModelConfig config_;
  std::string scheme_host_port_;
  std::string path_;
};

// One-shot convenience wrapper around LiveClient.
std::string complete(const ModelConfig& config, std::span<const ChatMessage> messages);

// Deterministic test double. Replies are looked up by exact key first, then by
// (image, question) with any turn index, then default_reply.
class ScriptedBackend final : public ChatBackend {
public:
  using Key = std::tuple<std::string, int, int>;

  explicit ScriptedBackend(std::string default_reply = {});

  void set_reply(const std::string& image_id, int question_id, int turn_index, std::string text);
  // Applies to every turn of the question that has no exact entry.
  void set_reply(const std::string& image_id, int question_id, std::string text);

  std::string scripted_complete(const CallKey& key) const;

  std::string complete(std::span<const ChatMessage> messages, const CallKey& key) override;
  bool needs_image_bytes() const override { return false; }

  std::size_t call_count() const { return calls_.load(); }
  const std::string& default_reply() const { return default_reply_; }

  // {"default_reply": str, "replies": [{"image_id", "question_id", "turn_index"?, "text"}]}
  static ScriptedBackend from_json(const nlohmann::json& doc);
  static ScriptedBackend from_file(const std::filesystem::path& path);

  ScriptedBackend(const ScriptedBackend& other);
  ScriptedBackend& operator=(const ScriptedBackend&) = delete;

private:
  std::string default_reply_;
  std::map<Key, std::string> exact_;
  std::map<std::pair<std::string, int>, std::string> any_turn_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace vislint
