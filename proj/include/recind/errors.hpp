#pragma once

#include <stdexcept>
#include <string>

namespace recind {

// Malformed input: dimension mismatches, non-finite coordinates, bad files.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// A computation would exceed a configured resource cap (enumeration size,
// state-table size, quadrature refinement limit).
class CapError : public std::runtime_error {
public:
    explicit CapError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace recind
