#include <fstream>

#include "vislint/errors.hpp"
#include "vislint/vlm_client.hpp"

namespace vislint {

ScriptedBackend::ScriptedBackend(std::string default_reply) : default_reply_(std::move(default_reply)) {}

ScriptedBackend::ScriptedBackend(const ScriptedBackend& other)
    : default_reply_(other.default_reply_), exact_(other.exact_), any_turn_(other.any_turn_) {}

void ScriptedBackend::set_reply(const std::string& image_id, int question_id, int turn_index, std::string text) {
  exact_[{image_id, question_id, turn_index}] = std::move(text);
}

void ScriptedBackend::set_reply(const std::string& image_id, int question_id, std::string text) {
  any_turn_[{image_id, question_id}] = std::move(text);
}

std::string ScriptedBackend::scripted_complete(const CallKey& key) const {
  if (auto it = exact_.find({key.image_id, key.question_id, key.turn_index}); it != exact_.end()) return it->second;
  if (auto it = any_turn_.find({key.image_id, key.question_id}); it != any_turn_.end()) return it->second;
  return default_reply_;
}

std::string ScriptedBackend::complete(std::span<const ChatMessage>, const CallKey& key) {
  ++calls_;
  return scripted_complete(key);
}

ScriptedBackend ScriptedBackend::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error("mock script must be a JSON object");
  ScriptedBackend out(doc.value("default_reply", std::string()));
  if (!doc.contains("replies")) return out;
  const auto& replies = doc["replies"];
  if (!replies.is_array()) throw Error("mock script 'replies' must be an array");
  for (std::size_t i = 0; i < replies.size(); ++i) {
    const auto& r = replies[i];
    if (!r.is_object() || !r.contains("image_id") || !r["image_id"].is_string() || !r.contains("question_id") ||
        !r["question_id"].is_number_integer() || !r.contains("text") || !r["text"].is_string()) {
      throw Error("mock reply " + std::to_string(i) + ": needs image_id, question_id and text");
    }
    const auto image = r["image_id"].get<std::string>();
    const int q = r["question_id"].get<int>();
    auto text = r["text"].get<std::string>();
    if (r.contains("turn_index")) {
      if (!r["turn_index"].is_number_integer()) throw Error("mock reply " + std::to_string(i) + ": bad turn_index");
      out.set_reply(image, q, r["turn_index"].get<int>(), std::move(text));
    } else {
      out.set_reply(image, q, std::move(text));
    }
  }
  return out;
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mock script " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("mock script " + path.string() + ": " + e.what());
  }
}

}  // namespace vislint
