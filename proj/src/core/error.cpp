#include "vfx/core/error.hpp"

namespace vfx {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::MissingFile: return "MissingFile";
        case ErrorKind::MalformedRecord: return "MalformedRecord";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::OutOfBounds: return "OutOfBounds";
        case ErrorKind::EmptyMesh: return "EmptyMesh";
        case ErrorKind::NoFlatSupport: return "NoFlatSupport";
        case ErrorKind::Degenerate: return "Degenerate";
        case ErrorKind::NotWatertight: return "NotWatertight";
        case ErrorKind::MultipleLoops: return "MultipleLoops";
        case ErrorKind::OpenBoundary: return "OpenBoundary";
        case ErrorKind::UnknownLabel: return "UnknownLabel";
        case ErrorKind::EmptySelection: return "EmptySelection";
        case ErrorKind::PreconditionFailed: return "PreconditionFailed";
        case ErrorKind::MissingHull: return "MissingHull";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::TooFewPoints: return "TooFewPoints";
        case ErrorKind::ConflictingTrack: return "ConflictingTrack";
        case ErrorKind::NoEmittersFound: return "NoEmittersFound";
        case ErrorKind::ResolutionMismatch: return "ResolutionMismatch";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::NoMatch: return "NoMatch";
        case ErrorKind::MissingMetadata: return "MissingMetadata";
        case ErrorKind::EndpointError: return "EndpointError";
        case ErrorKind::UnparseableReply: return "UnparseableReply";
        case ErrorKind::SyntaxError: return "SyntaxError";
        case ErrorKind::InvalidProgram: return "InvalidProgram";
        case ErrorKind::RuntimeFault: return "RuntimeFault";
        case ErrorKind::NoProgramFound: return "NoProgramFound";
        case ErrorKind::ExhaustedAttempts: return "ExhaustedAttempts";
        case ErrorKind::UnknownInstruction: return "UnknownInstruction";
        case ErrorKind::UnsupportedFunction: return "UnsupportedFunction";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace vfx
