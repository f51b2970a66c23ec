#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nfloc {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorC = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Propagation speed used throughout the channel model (m/s).
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Errc {
  InvalidArgument,
  OriginDegenerate,
  AngleOutOfRange,
  IndexOutOfRange,
  InvalidBand,
  ZeroSignal,
  LayoutMismatch,
  DimensionMismatch,
  DegenerateOrigin,
  EmptyTrials,
  InvalidLayout,
  ParseError,
  ValidationError,
  Io,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::OriginDegenerate: return "OriginDegenerate";
    case Errc::AngleOutOfRange: return "AngleOutOfRange";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::InvalidBand: return "InvalidBand";
    case Errc::ZeroSignal: return "ZeroSignal";
    case Errc::LayoutMismatch: return "LayoutMismatch";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::DegenerateOrigin: return "DegenerateOrigin";
    case Errc::EmptyTrials: return "EmptyTrials";
    case Errc::InvalidLayout: return "InvalidLayout";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace nfloc
