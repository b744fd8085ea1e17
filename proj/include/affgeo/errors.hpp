#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace affgeo {

enum class ErrorCode {
  NotInOverlap,
  StencilLeavesDomain,
  ChartMissing,
  LeftAtlas,
  HopLimit,
  NoCommonChart,
  NoConvergence,
  SingularFrame,
  SingularGroupElement,
  SeedChartMismatch,
  BasePointMismatch,
  NotKilling,
  ParseError,
  UnknownCatalogName,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the engine carries one of the codes above so that
/// callers (and the scenario harness) can tell numerical breakdown apart from
/// misuse.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace affgeo
