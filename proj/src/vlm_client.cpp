#include "vislint/vlm_client.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <regex>
#include <thread>

#include <httplib.h>

#include "vislint/errors.hpp"

namespace vislint {

namespace {

constexpr std::string_view kBase64Alphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int base64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

nlohmann::json message_json(const ChatMessage& m) {
  nlohmann::json content = nlohmann::json::array();
  if (m.image) {
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", encode_image(*m.image)}}}});
  }
  content.push_back({{"type", "text"}, {"text", m.text}});
  return {{"role", to_string(m.role)}, {"content", content}};
}

}  // namespace

std::string_view to_string(MediaType m) { return m == MediaType::png ? "png" : "jpeg"; }

std::string_view to_string(Role r) {
  switch (r) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
  }
  return "?";
}

ImagePayload ImagePayload::from_bytes(std::vector<std::uint8_t> bytes) {
  static constexpr std::uint8_t kPng[] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  static constexpr std::uint8_t kJpeg[] = {0xFF, 0xD8, 0xFF};
  if (bytes.empty()) throw PreconditionError("image payload is empty");
  auto starts_with = [&](std::span<const std::uint8_t> magic) {
    return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
  };
  ImagePayload out;
  if (starts_with(kPng)) {
    out.media_type = MediaType::png;
  } else if (starts_with(kJpeg)) {
    out.media_type = MediaType::jpeg;
  } else {
    throw PreconditionError("image is neither PNG nor JPEG");
  }
  out.bytes = std::move(bytes);
  return out;
}

ImagePayload load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open image " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return ImagePayload::from_bytes(std::move(bytes));
  } catch (const PreconditionError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string_view to_string(DecodeMode m) { return m == DecodeMode::sampling ? "sampling" : "server-default"; }

DecodeMode decode_mode_from_name(std::string_view name) {
  if (name == "sampling") return DecodeMode::sampling;
  if (name == "server-default") return DecodeMode::server_default;
  throw PreconditionError("unknown decode mode '" + std::string(name) + "'");
}

void ModelConfig::validate() const {
  static const std::regex kAbsolute(R"(^https?://[^/\s]+(/\S*)?$)");
  if (!std::regex_match(endpoint_url, kAbsolute)) {
    throw PreconditionError("endpoint_url must be an absolute http(s) URL: '" + endpoint_url + "'");
  }
  if (model_name.empty()) throw PreconditionError("model_name is empty");
  if (temperature < 0) throw PreconditionError("temperature must be >= 0");
  if (max_tokens <= 0) throw PreconditionError("max_tokens must be positive");
  if (max_retries < 0 || max_retries > kMaxRetriesLimit) throw PreconditionError("max_retries must be in 0..5");
}

void apply_api_key_env(ModelConfig& config) {
  if (config.api_key) return;
  if (const char* v = std::getenv(kApiKeyEnv); v != nullptr && *v != '\0') config.api_key = v;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back(kBase64Alphabet[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw PreconditionError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int v[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + static_cast<std::size_t>(j)];
      if (c == '=' && i + 4 == text.size() && j >= 2) {
        v[j] = 0;
        ++pad;
        continue;
      }
      if (pad > 0 || (v[j] = base64_value(c)) < 0) throw PreconditionError("invalid base64 character");
    }
    const std::uint32_t word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((word >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(word & 0xFF));
  }
  return out;
}

std::string encode_image(const ImagePayload& image) {
  return "data:image/" + std::string(to_string(image.media_type)) + ";base64," + base64_encode(image.bytes);
}

nlohmann::json build_request_body(const ModelConfig& config, std::span<const ChatMessage> messages) {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back(message_json(m));
  nlohmann::json body = {{"model", config.model_name}, {"messages", msgs}, {"max_tokens", config.max_tokens}};
  if (config.decode_mode == DecodeMode::sampling) {
    body["temperature"] = config.temperature;
    body["top_p"] = config.top_p;
  }
  return body;
}

std::string parse_completion(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("response is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw ProtocolError("response has no choices");
  }
  const auto& choice = doc["choices"][0];
  if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object()) {
    throw ProtocolError("first choice has no message");
  }
  const auto& content = choice["message"].value("content", nlohmann::json());
  if (content.is_string()) return content.get<std::string>();
  if (content.is_array()) {
    std::string text;
    for (const auto& part : content) {
      if (part.is_object() && part.value("type", "") == "text" && part.contains("text") && part["text"].is_string()) {
        text += part["text"].get<std::string>();
      }
    }
    return text;
  }
  throw ProtocolError("message content is neither a string nor a list of parts");
}

LiveClient::LiveClient(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  static const std::regex kSplit(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  std::regex_match(config_.endpoint_url, m, kSplit);
  scheme_host_port_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : std::string();
  while (!path_.empty() && path_.back() == '/') path_.pop_back();
  path_ += "/chat/completions";
}

std::string LiveClient::complete(std::span<const ChatMessage> messages, const CallKey&) { return complete(messages); }

std::string LiveClient::complete(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw PreconditionError("no messages to send");
  const std::string body = build_request_body(config_, messages).dump();

  httplib::Headers headers;
  if (config_.api_key) headers.emplace("Authorization", "Bearer " + *config_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.retry_backoff * (1 << (attempt - 1)));

    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("server rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status >= 500 || res->status == 429) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    return parse_completion(res->body);
  }
  throw BackendError("giving up after " + std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

std::string complete(const ModelConfig& config, std::span<const ChatMessage> messages) {
  return LiveClient(config).complete(messages);
}

}  // namespace vislint
