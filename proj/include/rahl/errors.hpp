#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rahl {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad value passed to an operation (non-finite input, empty window,
/// nonpositive delta, mismatched lengths, ...). Maps to exit code 1.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

enum class DataErrorKind {
    FileNotFound,
    ColumnNotFound,
    NoRows,
    AllNan,
    DegenerateScale,
    SplitTooSmall,
    BadFormat,
    ChecksumMismatch,
    VersionMismatch,
    UndefinedMetric,
};

/// Anything wrong with input data or on-disk artifacts. Maps to exit code 2.
class DataError : public Error {
public:
    DataError(DataErrorKind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    DataErrorKind kind() const noexcept { return kind_; }

private:
    DataErrorKind kind_;
};

/// Non-finite loss or gradient during training. Maps to exit code 3.
class TrainingDiverged : public Error {
public:
    TrainingDiverged(const std::string& msg, std::size_t epoch, std::size_t batch,
                     std::string param = {})
        : Error(msg), epoch_(epoch), batch_(batch), param_(std::move(param)) {}

    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t batch() const noexcept { return batch_; }
    const std::string& param() const noexcept { return param_; }

private:
    std::size_t epoch_;
    std::size_t batch_;
    std::string param_;
};

}  // namespace rahl
