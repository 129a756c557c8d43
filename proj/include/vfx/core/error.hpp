#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vfx {

/// Every failure the engine can raise. The CLI maps each kind to a failure category.
enum class ErrorKind {
    MissingFile,
    MalformedRecord,
    InvariantViolation,
    OutOfBounds,
    EmptyMesh,
    NoFlatSupport,
    Degenerate,
    NotWatertight,
    MultipleLoops,
    OpenBoundary,
    UnknownLabel,
    EmptySelection,
    PreconditionFailed,
    MissingHull,
    NonFiniteState,
    TooFewPoints,
    ConflictingTrack,
    NoEmittersFound,
    ResolutionMismatch,
    IoError,
    NoMatch,
    MissingMetadata,
    EndpointError,
    UnparseableReply,
    SyntaxError,
    InvalidProgram,
    RuntimeFault,
    NoProgramFound,
    ExhaustedAttempts,
    UnknownInstruction,
    UnsupportedFunction,
    ConfigError,
};

inline constexpr std::array kAllErrorKinds = {
    ErrorKind::MissingFile,        ErrorKind::MalformedRecord,   ErrorKind::InvariantViolation,
    ErrorKind::OutOfBounds,        ErrorKind::EmptyMesh,         ErrorKind::NoFlatSupport,
    ErrorKind::Degenerate,         ErrorKind::NotWatertight,     ErrorKind::MultipleLoops,
    ErrorKind::OpenBoundary,       ErrorKind::UnknownLabel,      ErrorKind::EmptySelection,
    ErrorKind::PreconditionFailed, ErrorKind::MissingHull,       ErrorKind::NonFiniteState,
    ErrorKind::TooFewPoints,       ErrorKind::ConflictingTrack,  ErrorKind::NoEmittersFound,
    ErrorKind::ResolutionMismatch, ErrorKind::IoError,           ErrorKind::NoMatch,
    ErrorKind::MissingMetadata,    ErrorKind::EndpointError,     ErrorKind::UnparseableReply,
    ErrorKind::SyntaxError,        ErrorKind::InvalidProgram,    ErrorKind::RuntimeFault,
    ErrorKind::NoProgramFound,     ErrorKind::ExhaustedAttempts, ErrorKind::UnknownInstruction,
    ErrorKind::UnsupportedFunction, ErrorKind::ConfigError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace vfx
