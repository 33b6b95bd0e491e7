#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cflow {

enum class Errc {
  DimensionMismatch,
  OutsideReachTube,
  InvalidResolution,
  NotOnDomain,
  InvalidArgument,
  NonFiniteState,
  LinesearchFailed,
  EmptySample,
  SizeMismatch,
  SizeTooLarge,
  InvalidSweep,
  UnknownFigure,
  InvalidConfig,
  Io,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::OutsideReachTube: return "OutsideReachTube";
    case Errc::InvalidResolution: return "InvalidResolution";
    case Errc::NotOnDomain: return "NotOnDomain";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::LinesearchFailed: return "LinesearchFailed";
    case Errc::EmptySample: return "EmptySample";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::SizeTooLarge: return "SizeTooLarge";
    case Errc::InvalidSweep: return "InvalidSweep";
    case Errc::UnknownFigure: return "UnknownFigure";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cflow
