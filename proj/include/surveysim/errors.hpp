#pragma once

#include <stdexcept>
#include <string>

namespace surveysim {

// Base class for all library errors. Callers that do not care about the
// specific failure mode can catch this alone.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration: bad spec values, missing credentials, unmapped
// countries, unusable plans.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed input data (population files, response files, raw ratings).
class ParseError : public Error {
public:
    using Error::Error;
};

// A catalog or other structured input failed schema validation.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Prompt rendering could not be completed for a persona/catalog pair.
class RenderError : public Error {
public:
    using Error::Error;
};

// A respondent backend failed terminally (transport, HTTP, aggregate).
class BackendError : public Error {
public:
    using Error::Error;
};

// The regression design matrix is rank deficient.
class SingularDesignError : public Error {
public:
    using Error::Error;
};

// A bundled data file does not match its recorded checksum.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Report inputs are structurally incomplete or inconsistent.
class StructuralError : public Error {
public:
    using Error::Error;
};

} // namespace surveysim
