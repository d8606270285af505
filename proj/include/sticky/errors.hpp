#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sticky::err {

// Error conditions named by the contract they guard. All derive from
// std::runtime_error so callers may catch coarsely or by name.

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

struct Negative : std::runtime_error {
    explicit Negative(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionTooLarge : std::runtime_error {
    explicit DimensionTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidStickiness : std::runtime_error {
    explicit InvalidStickiness(const std::string& what) : std::runtime_error(what) {}
};

struct NotSymmetric : std::runtime_error {
    explicit NotSymmetric(const std::string& what) : std::runtime_error(what) {}
};

struct NotC1 : std::runtime_error {
    explicit NotC1(const std::string& what) : std::runtime_error(what) {}
};

struct KappaDiverges : std::runtime_error {
    explicit KappaDiverges(const std::string& what) : std::runtime_error(what) {}
};

struct ToleranceNotMet : std::runtime_error {
    explicit ToleranceNotMet(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownSite : std::runtime_error {
    explicit UnknownSite(const std::string& what) : std::runtime_error(what) {}
};

struct StepTooLarge : std::runtime_error {
    explicit StepTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct CapTooSmall : std::runtime_error {
    explicit CapTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct StateSpaceTooLarge : std::runtime_error {
    explicit StateSpaceTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct NotConverged : std::runtime_error {
    explicit NotConverged(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientReplicas : std::runtime_error {
    explicit InsufficientReplicas(const std::string& what) : std::runtime_error(what) {}
};

struct Parse : std::runtime_error {
    explicit Parse(const std::string& what) : std::runtime_error(what) {}
};

// Carries every violated constraint, each prefixed with the module that owns it.
struct Validation : std::runtime_error {
    std::vector<std::string> violations;

    explicit Validation(std::vector<std::string> list)
        : std::runtime_error(join(list)), violations(std::move(list)) {}

private:
    static std::string join(const std::vector<std::string>& list) {
        std::string out = "config validation failed:";
        for (const auto& v : list) {
            out += "\n  - ";
            out += v;
        }
        return out;
    }
};

}  // namespace sticky::err
