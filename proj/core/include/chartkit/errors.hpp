#ifndef CHARTKIT_ERRORS_HPP
#define CHARTKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chartkit {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what)
        : std::runtime_error(what)
    {
    }
};

// Malformed input bytes or text (MIDI, WAV, manifest, prediction files).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what)
        : Error(what)
    {
    }
};

}

#endif
