// Error taxonomy shared by all modules.
//
// domain_error   — bad inputs or configuration (CLI exit code 2)
// numeric_failure — a computation that started from valid inputs could not
//                   finish (non-convergence, root-count mismatch, overflow;
//                   CLI exit code 3)
// boundary_reached — the wavepacket hit the right end of the chain, so the
//                   finite chain no longer represents the half-line operator
#pragma once

#include <stdexcept>
#include <string>

namespace fibcone {

class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

class numeric_failure : public std::runtime_error {
public:
    explicit numeric_failure(const std::string& what) : std::runtime_error(what) {}
};

class boundary_reached : public numeric_failure {
public:
    explicit boundary_reached(const std::string& what) : numeric_failure(what) {}
};

} // namespace fibcone
