#pragma once

#include <stdexcept>
#include <string>

namespace vsys {

// Failure categories, grouped by how the CLI maps them to exit codes:
// parameter misuse -> 2, numerical failure -> 3, unknown command -> 4.
enum class Errc {
  NonPositiveRate,
  InvalidParameter,
  WrongBranch,
  BadInput,
  SingularGenerator,
  UnstableStep,
  NegativeRadicand,
  IllConditionedFit,
  NoPeaks,
  UnknownFigure,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

  bool is_parameter_error() const {
    return code_ == Errc::NonPositiveRate || code_ == Errc::InvalidParameter ||
           code_ == Errc::WrongBranch || code_ == Errc::BadInput;
  }

 private:
  Errc code_;
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::InvalidParameter: return "InvalidParameter";
    case Errc::WrongBranch: return "WrongBranch";
    case Errc::BadInput: return "BadInput";
    case Errc::SingularGenerator: return "SingularGenerator";
    case Errc::UnstableStep: return "UnstableStep";
    case Errc::NegativeRadicand: return "NegativeRadicand";
    case Errc::IllConditionedFit: return "IllConditionedFit";
    case Errc::NoPeaks: return "NoPeaks";
    case Errc::UnknownFigure: return "UnknownFigure";
  }
  return "Unknown";
}

}  // namespace vsys
