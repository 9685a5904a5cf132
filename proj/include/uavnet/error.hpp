// error.hpp
//
// Exception hierarchy shared by every module. Each stage of the pipeline
// throws a subclass of uavnet::Error; the CLI maps them to exit status 2.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uavnet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define UAVNET_DEFINE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

UAVNET_DEFINE_ERROR(ConfigError);
UAVNET_DEFINE_ERROR(IoError);
UAVNET_DEFINE_ERROR(DatasetError);
UAVNET_DEFINE_ERROR(TrainingError);
UAVNET_DEFINE_ERROR(PredictionError);
UAVNET_DEFINE_ERROR(EvaluationError);
UAVNET_DEFINE_ERROR(ClusteringError);
UAVNET_DEFINE_ERROR(SelectionError);
UAVNET_DEFINE_ERROR(ParameterError);
UAVNET_DEFINE_ERROR(BenchmarkError);
UAVNET_DEFINE_ERROR(TopologyError);
UAVNET_DEFINE_ERROR(ComparisonError);
UAVNET_DEFINE_ERROR(ConservationError);

#undef UAVNET_DEFINE_ERROR

// Malformed input file. line() is 1-based; 0 when the error is not tied to
// a particular line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace uavnet
