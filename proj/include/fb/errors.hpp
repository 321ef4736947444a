#ifndef FB_ERRORS_HPP
#define FB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fb {

// Error taxonomy mirrors the CLI exit codes: config 64, schema 65, io 66,
// solver failures 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error(m) {}
};

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& m) : std::runtime_error(m) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& m) : std::runtime_error(m) {}
};

struct SolverError : std::runtime_error {
    double residual = 0.0;
    explicit SolverError(const std::string& m, double res = 0.0)
        : std::runtime_error(m), residual(res) {}
};

// Numerical evidence that a model violates its structural hypotheses.
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& m) : std::runtime_error(m) {}
};

} // namespace fb

#endif
