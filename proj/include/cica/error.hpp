#pragma once

#include <stdexcept>
#include <string>

namespace cica {

/// Failure categories. The C API and the CLI map these onto status/exit codes.
enum class ErrorKind {
  Contract,       // precondition violated by the caller (shapes, counts, ranges)
  Config,         // invalid experiment or CLI configuration
  Parse,          // malformed input file
  Numerical,      // non-convergence, overflow, singular systems
  RankDeficient,  // whitening cannot produce the requested number of components
  Degenerate,     // constant marginal, zero-variance test statistic
  MissingClass,   // class id absent from a fitted model or training set
  InsufficientSamples,
  Domain,         // argument outside a function's mathematical domain
  Definiteness,   // Cholesky pivot <= 0
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Cholesky failure; carries the first pivot that was not strictly positive.
class DefinitenessError : public Error {
 public:
  DefinitenessError(std::size_t pivot, const std::string& what)
      : Error(ErrorKind::Definiteness, what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Whitening failure; reports how many components the data can support.
class RankError : public Error {
 public:
  RankError(std::size_t achievable, const std::string& what)
      : Error(ErrorKind::RankDeficient, what), achievable_(achievable) {}
  std::size_t achievable() const noexcept { return achievable_; }

 private:
  std::size_t achievable_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::Contract, what);
}

}  // namespace cica
