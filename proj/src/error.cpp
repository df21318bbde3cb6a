#include "cadact/error.hpp"

namespace cadact {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedToken: return "MalformedToken";
    case ErrorCode::DanglingLoop: return "DanglingLoop";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateNormal: return "DegenerateNormal";
    case ErrorCode::OffCanvas: return "OffCanvas";
    case ErrorCode::DegenerateChord: return "DegenerateChord";
    case ErrorCode::ReflexOverflow: return "ReflexOverflow";
    case ErrorCode::OpenLoop: return "OpenLoop";
    case ErrorCode::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorCode::MalformedVector: return "MalformedVector";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::ZeroDepth: return "ZeroDepth";
    case ErrorCode::RemoveFromEmpty: return "RemoveFromEmpty";
    case ErrorCode::EmptySolid: return "EmptySolid";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::DegenerateCloud: return "DegenerateCloud";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::IdMismatch: return "IdMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::InsufficientEpisodes: return "InsufficientEpisodes";
    case ErrorCode::PrerequisiteUnmet: return "PrerequisiteUnmet";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace cadact
