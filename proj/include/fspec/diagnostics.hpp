#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "fspec/source.hpp"

namespace fspec {

/// Base for all diagnostics that point at a source location.
class Diagnostic : public std::runtime_error {
 public:
  Diagnostic(SourceSpan span, const std::string& message)
      : std::runtime_error(span.str() + ": " + message),
        span_(std::move(span)),
        message_(message) {}

  const SourceSpan& span() const { return span_; }
  const std::string& message() const { return message_; }

 private:
  SourceSpan span_;
  std::string message_;
};

class LexError : public Diagnostic {
 public:
  using Diagnostic::Diagnostic;
};

class ParseError : public Diagnostic {
 public:
  using Diagnostic::Diagnostic;
};

class TypeError : public Diagnostic {
 public:
  using Diagnostic::Diagnostic;
};

class MissingDecreases : public TypeError {
 public:
  using TypeError::TypeError;
};

/// A `--const` override names something that is not an unspecified constant.
class UnknownConstant : public std::runtime_error {
 public:
  explicit UnknownConstant(const std::string& name)
      : std::runtime_error("unknown constant '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// A parameterless theorem evaluated to false while resolving constants.
class TheoremFailed : public std::runtime_error {
 public:
  explicit TheoremFailed(const std::string& name)
      : std::runtime_error("theorem '" + name + "' is violated"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Cardinality or input-count arithmetic exceeded the count representation.
class CountOverflow : public std::runtime_error {
 public:
  explicit CountOverflow(const std::string& what) : std::runtime_error(what) {}
};

/// A scaffold request named something that is not a suitable predicate.
class UnknownPredicate : public std::runtime_error {
 public:
  explicit UnknownPredicate(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fspec
