#pragma once

#include <stdexcept>
#include <string>

namespace leadlag {

/// Malformed or inconsistent input data (CSV rows, candle invariants).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The method cannot produce a result for otherwise valid data
/// (no extrema, unreachable wavelength, undefined statistics).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace leadlag
