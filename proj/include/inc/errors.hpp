#pragma once

#include <stdexcept>
#include <string>

namespace inc {

// Shape or layout disagreement between tensors / operators / files.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

// NaN/Inf detected, or an operation that would produce one. Training steps
// abort with this instead of propagating non-finite values.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Bad user-supplied configuration (flag values, capacities, modes).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// File format / truncation / magic problems.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Single-pass stream consumed twice.
class StreamExhausted : public std::runtime_error {
public:
    explicit StreamExhausted(const std::string& what) : std::runtime_error(what) {}
};

} // namespace inc
