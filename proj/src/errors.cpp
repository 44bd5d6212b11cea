#include "vislint/errors.hpp"

#include <utility>

namespace vislint {

UnknownType::UnknownType(const std::string& label, const std::string& why)
    : Error("unknown diagram type '" + label + "': " + why), label_(label) {}

SchemaError::SchemaError(std::size_t record_index, std::string field, const std::string& message)
    : Error("manifest record " + std::to_string(record_index) + ", field '" + field + "': " + message),
      record_index_(record_index),
      field_(std::move(field)) {}

DuplicateId::DuplicateId(const std::string& image_id)
    : Error("duplicate image_id '" + image_id + "'"), image_id_(image_id) {}

InsufficientPool::InsufficientPool(const std::string& raw_type, std::size_t wanted, std::size_t available)
    : Error("insufficient pool for '" + raw_type + "': wanted " + std::to_string(wanted) + ", have " +
            std::to_string(available)),
      raw_type_(raw_type) {}

LengthMismatch::LengthMismatch(std::size_t preds, std::size_t truths)
    : Error("length mismatch: " + std::to_string(preds) + " predictions vs " + std::to_string(truths) +
            " ground-truth labels") {}

namespace {
std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}
}  // namespace

MissingGroundTruth::MissingGroundTruth(std::vector<std::string> ids)
    : Error("no ground truth for: " + join_ids(ids)), ids_(std::move(ids)) {}

}  // namespace vislint
