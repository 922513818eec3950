#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace seclud {

using DocId = std::uint32_t;
using TermId = std::uint32_t;
using ClusterId = std::uint32_t;

inline constexpr TermId kNoTerm = std::numeric_limits<TermId>::max();

// Bad input, bad flags, unreadable files: reported to the user, exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A broken internal invariant: exit code 2.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

#define SECLUD_CHECK(cond, msg)                                                    \
    do {                                                                           \
        if (!(cond)) {                                                             \
            throw ::seclud::InvariantViolation(std::string(__FILE__) + ":" +       \
                                               std::to_string(__LINE__) + ": " +   \
                                               (msg));                             \
        }                                                                          \
    } while (0)

}  // namespace seclud
