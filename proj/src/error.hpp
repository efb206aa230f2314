#pragma once

#include <stdexcept>
#include <string>

namespace deckgen {

enum class Errc {
    parse,      // malformed input document
    validate,   // invariant violation in an otherwise well-formed document
    arity,      // content does not fit the template's slots
    overflow,   // content signature outside every selection rule
    singular,   // rank-deficient least-squares design
    stats,      // undefined statistic (e.g. correlation of a constant vector)
    weights,    // weight derivation from unusable coefficients
    io,         // file read / decode failure
    empty,      // empty input where content is required
    bad_arg,    // invalid argument value
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace deckgen
