#pragma once

#include <stdexcept>
#include <string>

namespace hoferlab {

/// Error categories raised across the library. The CLI reports them by name.
enum class ErrorKind {
  SyntaxError,
  UnknownVariable,
  UnguardedDivision,
  DomainError,
  NonConvergence,
  AmbiguousLift,
  StepUnderflow,
  NotFixed,
  ExtremumSearchUnstable,
  NotRegular,
  MismatchedEndpoint,
  SectionDegenerate,
  ShortOrbitInK,
  PreconditionFailed,
  NoGradientPath,
  ShortOrbit,
  LevelTooShort,
  ContainmentFailed,
  EndpointMismatch,
  InconsistentArea,
  NondegeneracyFailed,
  ResidualTooLarge,
  NewtonDiverged,
  EndpointNotFixed,
  SchemaError,
  UnknownExperiment,
  IoError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::UnguardedDivision: return "UnguardedDivision";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::AmbiguousLift: return "AmbiguousLift";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::NotFixed: return "NotFixed";
    case ErrorKind::ExtremumSearchUnstable: return "ExtremumSearchUnstable";
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::MismatchedEndpoint: return "MismatchedEndpoint";
    case ErrorKind::SectionDegenerate: return "SectionDegenerate";
    case ErrorKind::ShortOrbitInK: return "ShortOrbitInK";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::NoGradientPath: return "NoGradientPath";
    case ErrorKind::ShortOrbit: return "ShortOrbit";
    case ErrorKind::LevelTooShort: return "LevelTooShort";
    case ErrorKind::ContainmentFailed: return "ContainmentFailed";
    case ErrorKind::EndpointMismatch: return "EndpointMismatch";
    case ErrorKind::InconsistentArea: return "InconsistentArea";
    case ErrorKind::NondegeneracyFailed: return "NondegeneracyFailed";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::EndpointNotFixed: return "EndpointNotFixed";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnknownExperiment: return "UnknownExperiment";
    case ErrorKind::IoError: return "IoError";
  }
  return "Error";
}

}  // namespace hoferlab
