#pragma once

#include <stdexcept>
#include <string>

namespace orchard {

/// Bad or inconsistent configuration / parameter values. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File access or parse failures. CLI exit code 3.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A pipeline stage violated its contract or received violating input.
/// CLI exit code 4.
class PipelineError : public std::runtime_error {
public:
  PipelineError(std::string stage, const std::string& msg)
      : std::runtime_error(stage + ": " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

/// Planning failed: request off the graph or goal unreachable. CLI exit code 5.
class PlanError : public std::runtime_error {
public:
  enum class Kind { OffGraph, Unreachable };
  PlanError(Kind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

}  // namespace orchard
