#pragma once

#include <stdexcept>
#include <string>

namespace phobic {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

/// No seed up to the configured cap places a bucket. Almost always caused by
/// keys sharing a master hash; the top-level build retries with a new seed.
class SeedExhausted : public Error {
public:
    using Error::Error;
};

class DuplicateKeys : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace phobic
