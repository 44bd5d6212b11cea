#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vislint {

// Root of every error this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnknownType : public Error {
public:
  explicit UnknownType(const std::string& label, const std::string& why = "not a known diagram type");
  const std::string& label() const { return label_; }

private:
  std::string label_;
};

class SchemaError : public Error {
public:
  SchemaError(std::size_t record_index, std::string field, const std::string& message);
  std::size_t record_index() const { return record_index_; }
  const std::string& field() const { return field_; }

private:
  std::size_t record_index_;
  std::string field_;
};

class DuplicateId : public Error {
public:
  explicit DuplicateId(const std::string& image_id);
  const std::string& image_id() const { return image_id_; }

private:
  std::string image_id_;
};

class InsufficientPool : public Error {
public:
  InsufficientPool(const std::string& raw_type, std::size_t wanted, std::size_t available);
  const std::string& raw_type() const { return raw_type_; }

private:
  std::string raw_type_;
};

class MissingExemplars : public Error {
public:
  using Error::Error;
};

class PlanError : public Error {
public:
  using Error::Error;
};

// Transport or HTTP failure that survived the retry policy.
class BackendError : public Error {
public:
  using Error::Error;
};

class ProtocolError : public BackendError {
public:
  using BackendError::BackendError;
};

class AuthError : public BackendError {
public:
  using BackendError::BackendError;
};

class LengthMismatch : public Error {
public:
  LengthMismatch(std::size_t preds, std::size_t truths);
};

class EmptyInput : public Error {
public:
  using Error::Error;
};

class MissingGroundTruth : public Error {
public:
  explicit MissingGroundTruth(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const { return ids_; }

private:
  std::vector<std::string> ids_;
};

// A caller broke an operation's documented precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

}  // namespace vislint
