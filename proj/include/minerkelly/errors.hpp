#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace minerkelly {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No hash in the process, so no winner can be drawn.
class DegenerateStateError : public Error {
public:
    using Error::Error;
};

// Moments of W_i = R_i / M_i need M_i > 0 (and homogeneous facility prices).
class UndefinedMomentsError : public Error {
public:
    using Error::Error;
};

// M_i (r + c) = B: the stationary point of the stage payoff does not exist.
class SingularConfigurationError : public Error {
public:
    using Error::Error;
};

// A leverage that makes one of the payoff log arguments non-positive.
class InfeasibleLeverageError : public Error {
public:
    InfeasibleLeverageError(const std::string& what, std::string branch)
        : Error(what), branch_(std::move(branch)) {}
    const std::string& branch() const noexcept { return branch_; }

private:
    std::string branch_;
};

// Riskless return (sigma^2 = 0) passed to an approximant that divides by it.
class DegenerateReturnError : public Error {
public:
    using Error::Error;
};

// exp() of the requested argument is not representable; use the log-domain variant.
class OverflowError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, std::vector<double> last_iterate, int iterations)
        : Error(what), last_(std::move(last_iterate)), iterations_(iterations) {}
    const std::vector<double>& last_iterate() const noexcept { return last_; }
    int iterations() const noexcept { return iterations_; }

private:
    std::vector<double> last_;
    int iterations_;
};

// Malformed scenario document; path() names the offending field, e.g. "players[2].cost_rate".
class ScenarioError : public Error {
public:
    ScenarioError(std::string path, const std::string& what)
        : Error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace minerkelly
