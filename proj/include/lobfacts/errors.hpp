#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lobfacts {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptySide : public Error {
 public:
  EmptySide() : Error("book side has no levels") {}
};

class NonPositiveSpread : public Error {
 public:
  NonPositiveSpread() : Error("best ask is not above best bid") {}
};

class TooShort : public Error {
 public:
  using Error::Error;
};

class ZeroVariance : public Error {
 public:
  using Error::Error;
};

class DegenerateSample : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class EmptyFlow : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyFile : public Error {
 public:
  explicit EmptyFile(const std::string& path) : Error("empty file: " + path) {}
};

/// A malformed or invariant-violating input row. `row` is the 1-based line
/// number in the source file (the header is line 1).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string reason)
      : Error("row " + std::to_string(row) + ": " + reason),
        row_(row),
        reason_(std::move(reason)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t row_;
  std::string reason_;
};

/// Classified events failed to reproduce the next snapshot.
class InconsistentUpdate : public Error {
 public:
  InconsistentUpdate(std::size_t snapshot_index, const std::string& what)
      : Error("snapshot " + std::to_string(snapshot_index) + ": " + what),
        index_(snapshot_index) {}

  std::size_t snapshot_index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// An event that cannot be applied to the current book.
class ReplayError : public Error {
 public:
  ReplayError(std::uint64_t seq, const std::string& what)
      : Error("event " + std::to_string(seq) + ": " + what), seq_(seq) {}

  std::uint64_t seq() const noexcept { return seq_; }

 private:
  std::uint64_t seq_;
};

class BadCancel : public ReplayError {
 public:
  using ReplayError::ReplayError;
};

class BadMarket : public ReplayError {
 public:
  using ReplayError::ReplayError;
};

/// A limit order that would cross the opposite side.
class BadLimit : public ReplayError {
 public:
  using ReplayError::ReplayError;
};

}  // namespace lobfacts
