#pragma once

#include <stdexcept>
#include <string>

namespace ensdiv {

// Malformed or contract-violating input content: bad CSV cells, non-binary
// labels, truncated JSON documents and the like.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem-level failures (missing files, unwritable paths).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ensdiv
