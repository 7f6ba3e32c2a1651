#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace regionlab {

/// Error type thrown by every module on contract violations and bad input.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

template <typename... Parts>
std::string concat(Parts&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    return os.str();
}

} // namespace detail

/// Builds an Error from stream-formattable pieces.
template <typename... Parts>
[[noreturn]] void fail(Parts&&... parts) {
    throw Error(detail::concat(std::forward<Parts>(parts)...));
}

template <typename... Parts>
void require(bool condition, Parts&&... parts) {
    if (!condition)
        fail(std::forward<Parts>(parts)...);
}

} // namespace regionlab
