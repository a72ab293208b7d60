#pragma once

#include <stdexcept>
#include <string>

namespace cryptosim {

/// Bad input: malformed files, out-of-range parameters, violated preconditions.
/// The CLI maps this to exit status 1; anything else escaping is a runtime failure.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

[[noreturn]] inline void fail(const std::string& what) { throw ValidationError(what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(what);
}

}  // namespace cryptosim
