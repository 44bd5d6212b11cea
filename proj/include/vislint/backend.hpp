#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vislint {

enum class MediaType { png, jpeg };

std::string_view to_string(MediaType m);

struct ImagePayload {
  std::vector<std::uint8_t> bytes;
  MediaType media_type = MediaType::png;

  // Detects the media type from magic bytes. Throws PreconditionError for empty
  // or unrecognized data.
  static ImagePayload from_bytes(std::vector<std::uint8_t> bytes);

  friend bool operator==(const ImagePayload&, const ImagePayload&) = default;
};

ImagePayload load_image(const std::filesystem::path& path);

enum class Role { system, user, assistant };

std::string_view to_string(Role r);

struct ChatMessage {
  Role role = Role::user;
  std::string text;
  std::optional<ImagePayload> image;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

// Identifies one model turn: which image, which question it is attributed to,
// and its position among the model turns of its conversation.
struct CallKey {
  std::string image_id;
  int question_id = 0;
  int turn_index = 0;

  friend auto operator<=>(const CallKey&, const CallKey&) = default;
};

// Anything that can answer a chat conversation. Implementations must be safe to
// call from several threads at once.
class ChatBackend {
public:
  virtual ~ChatBackend() = default;

  virtual std::string complete(std::span<const ChatMessage> messages, const CallKey& key) = 0;

  // Test doubles answer from the key alone and never look at pixels.
  virtual bool needs_image_bytes() const { return true; }
};

}  // namespace vislint
