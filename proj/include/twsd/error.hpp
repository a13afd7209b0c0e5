#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace twsd {

// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A required data resource (stopword list, lemma dictionary) is absent.
class MissingResource : public Error {
 public:
  using Error::Error;
};

class MissingStopwordList : public MissingResource {
 public:
  using MissingResource::MissingResource;
};

class MissingLemmaDictionary : public MissingResource {
 public:
  using MissingResource::MissingResource;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class PositionMismatch : public Error {
 public:
  using Error::Error;
};

class MissingNode : public Error {
 public:
  using Error::Error;
};

class ClassTooSmall : public Error {
 public:
  using Error::Error;
};

class VertexNotInComponent : public Error {
 public:
  using Error::Error;
};

// No class component shares a link with the test instance.
class AllViewsEmpty : public Error {
 public:
  using Error::Error;
};

class InsufficientClassSize : public Error {
 public:
  using Error::Error;
};

}  // namespace twsd
