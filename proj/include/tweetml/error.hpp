#pragma once

#include <stdexcept>
#include <string>

namespace tweetml {

// Runtime failure inside a pipeline stage. The CLI maps it to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration or input that is rejected before any compute starts.
// The CLI maps it to exit code 1.
class ValidationError : public Error {
public:
    using Error::Error;
};

} // namespace tweetml
