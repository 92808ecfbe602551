#pragma once

#include <stdexcept>
#include <string>

namespace setcomp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A caller broke a precondition (value outside its range, bad parameter).
class ContractError : public Error {
public:
    using Error::Error;
};

// The decoder needed more payload bytes than were supplied.
class StreamExhausted : public Error {
public:
    StreamExhausted() : Error("stream exhausted: payload truncated") {}
};

// Malformed file, header or payload.
class FormatError : public Error {
public:
    using Error::Error;
};

// The model supplied for decoding is not the one used for encoding.
class ModelMismatch : public Error {
public:
    using Error::Error;
};

// The data contradicts a strict-statistics model (an outcome the model
// declares impossible was observed).
class ModelContradiction : public Error {
public:
    using Error::Error;
};

// q_t requested for a node whose parent counter is zero in strict mode.
class UndefinedContext : public ModelContradiction {
public:
    using ModelContradiction::ModelContradiction;
};

class UnsupportedSize : public Error {
public:
    using Error::Error;
};

} // namespace setcomp
