#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace icon {

enum class ErrorCode {
    UnknownCell,
    UnknownWindow,
    UnknownVariable,
    UnknownArtifact,
    UnknownColumn,
    UnknownRegion,
    NonPositiveRadius,
    OutOfBounds,
    KernelError,
    NotTabular,
    NotVisualizationCell,
    NotExecuted,
    KTooLarge,
    TypeMismatch,
    ColumnsNotSelected,
    NonNumeric,
    SameColumn,
    ArityMismatch,
    NotThreeD,
    BadIndex,
    OriginMismatch,
    WrongCellKind,
    WrongMode,
    WrongSpace,
    InvalidTarget,
    HandOccupied,
    HandEmpty,
    AlreadyHeld,
    RegionNotVisible,
    NonMonotonicTime,
    TargetNotEmpty,
    AmbiguousVariable,
    CorruptLog,
    NoCompletionMarker,
    ScriptStepFailed,
    SchemaError,
    IoError,
    ProtocolError,
    UnknownSession,
    BadCommand,
};

std::string_view to_string(ErrorCode code) noexcept;
std::optional<ErrorCode> error_code_from_string(std::string_view name) noexcept;

/// Exception carrying a machine-readable code. Every engine failure is one of these.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Schema violation in a persisted file. `line` is 1-based, 0 when only the JSON path is known.
class SchemaError : public Error {
public:
    SchemaError(std::string path, std::size_t line, const std::string& detail);

    [[nodiscard]] const std::string& path() const noexcept { return path_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// Replay failure pointing at the offending log line (1-based).
class CorruptLog : public Error {
public:
    CorruptLog(std::size_t line, const std::string& detail)
        : Error(ErrorCode::CorruptLog, "corrupt log at line " + std::to_string(line) + ": " + detail),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace icon
