#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperwind {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A lazily extended boundary word could not produce the requested letter.
class OracleExhausted : public Error {
 public:
  using Error::Error;
};

class NumericalInstability : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// The nearest orbit point sits on the depth horizon; retry with a deeper search.
class InconclusiveDepth : public Error {
 public:
  using Error::Error;
};

class MeasureError : public Error {
 public:
  using Error::Error;
};

class StabilizationFailure : public Error {
 public:
  using Error::Error;
};

/// Configuration or schema violation; `key()` names the offending key.
class SchemaError : public Error {
 public:
  SchemaError(std::string key, const std::string& what)
      : Error("schema error at '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class StageOrderError : public Error {
 public:
  using Error::Error;
};

class DigestMismatch : public Error {
 public:
  using Error::Error;
};

/// Wraps a failure raised while sampling one path of a batch.
class PathError : public Error {
 public:
  PathError(std::size_t index, const std::string& what)
      : Error("path " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace hyperwind
