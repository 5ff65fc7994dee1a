#pragma once

#include <stdexcept>
#include <string>

namespace typevec {

// Bad inputs: malformed records, shape mismatches, unknown ids, unreadable files.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failures: training divergence, undefined similarity, non-finite values.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace typevec
