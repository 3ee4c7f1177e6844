#pragma once

#include <stdexcept>
#include <string>

namespace tspd
{
    // Invalid numeric parameter (alpha < 1, h <= 0, ...).
    class ParameterError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Instance size outside what a solver supports.
    class SizeError : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    class IndexError : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    class UnsupportedFeature : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class ValidationError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    class IoError : public std::runtime_error
    {
    public:
        IoError(const std::string &path, const std::string &what)
            : std::runtime_error(path + ": " + what), path_(path) {}

        const std::string &path() const noexcept { return path_; }

    private:
        std::string path_;
    };
}
