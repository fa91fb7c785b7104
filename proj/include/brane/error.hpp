#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace brane {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define BRANE_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                    \
    public:                                                        \
        using Error::Error;                                        \
        const char* kind() const noexcept override { return #Name; } \
    }

BRANE_DEFINE_ERROR(ConfigError);
BRANE_DEFINE_ERROR(NonPositiveError);
BRANE_DEFINE_ERROR(NonFiniteError);
BRANE_DEFINE_ERROR(SingularMetric);
BRANE_DEFINE_ERROR(SupportError);
BRANE_DEFINE_ERROR(GridMismatch);
BRANE_DEFINE_ERROR(InsufficientSamples);
BRANE_DEFINE_ERROR(CflViolation);
BRANE_DEFINE_ERROR(RealizabilityError);

#undef BRANE_DEFINE_ERROR

/// The worldvolume approached lightlike character (Gamma below the guard).
/// Carries the slice time and the lattice multi-index of the offending point.
class DegenerateEvolution : public Error {
public:
    DegenerateEvolution(const std::string& what, double t, std::vector<std::size_t> location, double gamma)
        : Error(what), t_(t), location_(std::move(location)), gamma_(gamma) {}

    const char* kind() const noexcept override { return "DegenerateEvolution"; }
    double t() const noexcept { return t_; }
    const std::vector<std::size_t>& location() const noexcept { return location_; }
    double gamma() const noexcept { return gamma_; }

private:
    double t_;
    std::vector<std::size_t> location_;
    double gamma_;
};

/// Malformed snapshot or config file. `field` names the offending key, `line`
/// is 1-based (0 when unknown).
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::string field = {}, std::size_t line = 0)
        : Error(decorate(what, field, line)), field_(std::move(field)), line_(line) {}

    const char* kind() const noexcept override { return "FormatError"; }
    const std::string& field() const noexcept { return field_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string decorate(const std::string& what, const std::string& field, std::size_t line) {
        std::string out = what;
        if (!field.empty()) out += " (field '" + field + "')";
        if (line != 0) out += " (line " + std::to_string(line) + ")";
        return out;
    }

    std::string field_;
    std::size_t line_;
};

}  // namespace brane
