#include "affgeo/errors.hpp"

namespace affgeo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotInOverlap: return "NotInOverlap";
    case ErrorCode::StencilLeavesDomain: return "StencilLeavesDomain";
    case ErrorCode::ChartMissing: return "ChartMissing";
    case ErrorCode::LeftAtlas: return "LeftAtlas";
    case ErrorCode::HopLimit: return "HopLimit";
    case ErrorCode::NoCommonChart: return "NoCommonChart";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularFrame: return "SingularFrame";
    case ErrorCode::SingularGroupElement: return "SingularGroupElement";
    case ErrorCode::SeedChartMismatch: return "SeedChartMismatch";
    case ErrorCode::BasePointMismatch: return "BasePointMismatch";
    case ErrorCode::NotKilling: return "NotKilling";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownCatalogName: return "UnknownCatalogName";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace affgeo
