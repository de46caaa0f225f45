#include "icon/error.hpp"

namespace icon {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::UnknownCell: return "UnknownCell";
        case ErrorCode::UnknownWindow: return "UnknownWindow";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::UnknownArtifact: return "UnknownArtifact";
        case ErrorCode::UnknownColumn: return "UnknownColumn";
        case ErrorCode::UnknownRegion: return "UnknownRegion";
        case ErrorCode::NonPositiveRadius: return "NonPositiveRadius";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::KernelError: return "KernelError";
        case ErrorCode::NotTabular: return "NotTabular";
        case ErrorCode::NotVisualizationCell: return "NotVisualizationCell";
        case ErrorCode::NotExecuted: return "NotExecuted";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::ColumnsNotSelected: return "ColumnsNotSelected";
        case ErrorCode::NonNumeric: return "NonNumeric";
        case ErrorCode::SameColumn: return "SameColumn";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::NotThreeD: return "NotThreeD";
        case ErrorCode::BadIndex: return "BadIndex";
        case ErrorCode::OriginMismatch: return "OriginMismatch";
        case ErrorCode::WrongCellKind: return "WrongCellKind";
        case ErrorCode::WrongMode: return "WrongMode";
        case ErrorCode::WrongSpace: return "WrongSpace";
        case ErrorCode::InvalidTarget: return "InvalidTarget";
        case ErrorCode::HandOccupied: return "HandOccupied";
        case ErrorCode::HandEmpty: return "HandEmpty";
        case ErrorCode::AlreadyHeld: return "AlreadyHeld";
        case ErrorCode::RegionNotVisible: return "RegionNotVisible";
        case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
        case ErrorCode::TargetNotEmpty: return "TargetNotEmpty";
        case ErrorCode::AmbiguousVariable: return "AmbiguousVariable";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::NoCompletionMarker: return "NoCompletionMarker";
        case ErrorCode::ScriptStepFailed: return "ScriptStepFailed";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ProtocolError: return "ProtocolError";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::BadCommand: return "BadCommand";
    }
    return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept {
    for (int i = 0; i <= static_cast<int>(ErrorCode::BadCommand); ++i) {
        if (to_string(static_cast<ErrorCode>(i)) == name) return static_cast<ErrorCode>(i);
    }
    return std::nullopt;
}

namespace {

std::string schema_message(const std::string& path, std::size_t line, const std::string& detail) {
    std::string msg = path;
    if (line > 0) {
        msg += ":" + std::to_string(line);
    }
    return msg + ": " + detail;
}

}  // namespace

SchemaError::SchemaError(std::string path, std::size_t line, const std::string& detail)
    : Error(ErrorCode::SchemaError, schema_message(path, line, detail)),
      path_(std::move(path)),
      line_(line) {}

}  // namespace icon
