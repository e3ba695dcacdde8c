#pragma once

#include <stdexcept>
#include <string>

namespace advdir {

// Malformed external input (IDX files, serialized models).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// A well-posed request whose mathematical premise fails (inseparable data,
// empty joint subset, unachievable accuracy).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace advdir
