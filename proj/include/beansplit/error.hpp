#pragma once

#include <stdexcept>
#include <string>

namespace beansplit {

// Every failure the library can signal. CLI maps these onto exit codes:
// usage errors are caught by the parser, data errors exit 3, numeric
// failures exit 4.
enum class ErrorCode {
    // image codec
    MalformedHeader,
    TruncatedPayload,
    UnknownClassCode,
    // dataset
    MissingColumn,
    InvalidRetortTime,
    MissingLabel,
    DuplicateImage,
    DimensionMismatch,
    // network
    ChannelMismatch,
    OddDimensions,
    DimensionNotDivisible,
    EmptyLoss,
    ShapeMismatch,
    EmptyPartition,
    NonFiniteLoss,
    BadMagic,
    UnsupportedVersion,
    LengthMismatch,
    // measures
    NoBeanPixels,
    InvalidParameter,
    BinCountMismatch,
    // eval
    NoPositives,
    EmptyUnion,
    ZeroTruth,
    EmptySet,
    SingleClass,
    // stats
    UndefinedCorrelation,
    UnbalancedDesign,
    InsufficientReplication,
    ZeroVariance,
    // generic I/O
    IoFailure,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::MalformedHeader: return "MalformedHeader";
        case ErrorCode::TruncatedPayload: return "TruncatedPayload";
        case ErrorCode::UnknownClassCode: return "UnknownClassCode";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::InvalidRetortTime: return "InvalidRetortTime";
        case ErrorCode::MissingLabel: return "MissingLabel";
        case ErrorCode::DuplicateImage: return "DuplicateImage";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ChannelMismatch: return "ChannelMismatch";
        case ErrorCode::OddDimensions: return "OddDimensions";
        case ErrorCode::DimensionNotDivisible: return "DimensionNotDivisible";
        case ErrorCode::EmptyLoss: return "EmptyLoss";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::EmptyPartition: return "EmptyPartition";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::NoBeanPixels: return "NoBeanPixels";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::BinCountMismatch: return "BinCountMismatch";
        case ErrorCode::NoPositives: return "NoPositives";
        case ErrorCode::EmptyUnion: return "EmptyUnion";
        case ErrorCode::ZeroTruth: return "ZeroTruth";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::UndefinedCorrelation: return "UndefinedCorrelation";
        case ErrorCode::UnbalancedDesign: return "UnbalancedDesign";
        case ErrorCode::InsufficientReplication: return "InsufficientReplication";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
          code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // true for failures of numeric computation rather than bad input
    bool numeric() const noexcept { return code_ == ErrorCode::NonFiniteLoss; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

}  // namespace beansplit
