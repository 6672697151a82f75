#pragma once

#include <stdexcept>
#include <string>

namespace dynmap {

enum class ErrorKind {
  parse,           // malformed input text
  config,          // bad option or shape mismatch
  data,            // input data violates a contract
  domain,          // value outside a function's domain
  temporal_data,   // operation needs at least two periods
  hyperparameter,  // alpha / p / perplexity out of range
  degenerate,      // configuration with no spread
  divergence,      // optimizer produced a non-finite cost
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace dynmap
