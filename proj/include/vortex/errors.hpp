#pragma once

#include <stdexcept>
#include <string>

namespace vortex {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Poisson right-hand side with non-zero mean.
class SolvabilityError : public Error {
public:
    SolvabilityError(const std::string& what, double mean)
        : Error(what), mean_(mean) {}
    double mean() const noexcept { return mean_; }

private:
    double mean_;
};

// Conformal factor whose total volume differs from the background volume.
class VolumeConstraintError : public Error {
public:
    VolumeConstraintError(const std::string& what, double volume, double expected)
        : Error(what), volume_(volume), expected_(expected) {}
    double volume() const noexcept { return volume_; }
    double expected() const noexcept { return expected_; }

private:
    double volume_;
    double expected_;
};

// Raised when tau^2 V - 4 pi N <= 0.
class BradlowRefusal : public Error {
public:
    BradlowRefusal(const std::string& what, double margin)
        : Error(what), margin_(margin) {}
    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace vortex
