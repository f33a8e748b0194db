#pragma once

#include <stdexcept>
#include <string>

namespace cdscan {

/// Bad input data: malformed corpora, empty cohorts, undefined estimates.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad invocation: unknown flags, invalid option values.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The embedded lexicon or a schema set failed a consistency check.
class LexiconError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cdscan
