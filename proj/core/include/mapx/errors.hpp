#pragma once

#include <stdexcept>
#include <string>

namespace mapx {

// Base class for all library faults. Expected outcomes such as an unreachable
// goal are reported as values, not exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class DegenerateEvidence : public Error {
 public:
  using Error::Error;
};

class NoConsistentMap : public Error {
 public:
  using Error::Error;
};

class AllDetectorsUsed : public Error {
 public:
  using Error::Error;
};

class ZeroProbabilityEvidence : public Error {
 public:
  using Error::Error;
};

class OutcomesNotExhaustive : public Error {
 public:
  using Error::Error;
};

class NotAdjacent : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mapx
