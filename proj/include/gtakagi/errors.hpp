#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gtakagi {

// Base class for all library errors. Each concrete error maps to a stable
// CLI exit code (see code()).
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
    virtual int code() const noexcept { return 1; }
};

// Input outside the mathematical domain of an operation.
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
    int code() const noexcept override { return 2; }
};

// Working precision too small for the requested orbit depth.
class insufficient_precision : public error {
public:
    insufficient_precision(long depth, long need_bits, long have_bits)
        : error("insufficient precision: depth " + std::to_string(depth) +
                " needs " + std::to_string(need_bits) + " bits, have " +
                std::to_string(have_bits)),
          depth(depth), need_bits(need_bits), have_bits(have_bits) {}
    int code() const noexcept override { return 3; }
    long depth;
    long need_bits;
    long have_bits;
};

// An enclosure straddles the branch point 1/beta; the digit cannot be
// certified at the current radius.
class ambiguous_branch : public error {
public:
    explicit ambiguous_branch(long index)
        : error("ambiguous branch at orbit step " + std::to_string(index)),
          index(index) {}
    int code() const noexcept override { return 5; }
    long index;
};

// Rejection sampler exhausted its draw budget.
class sample_budget_exceeded : public error {
public:
    explicit sample_budget_exceeded(std::uint64_t budget)
        : error("sampling budget exceeded after " + std::to_string(budget) +
                " draws"),
          budget(budget) {}
    int code() const noexcept override { return 4; }
    std::uint64_t budget;
};

// Digit streams agreed through the whole search depth.
class separation_not_found : public error {
public:
    explicit separation_not_found(long max_depth)
        : error("no digit separation found through depth " +
                std::to_string(max_depth)),
          max_depth(max_depth) {}
    int code() const noexcept override { return 6; }
    long max_depth;
};

// Fewer digit-1 positions than the requested witness length.
class not_enough_ones : public error {
public:
    not_enough_ones(long found, long wanted)
        : error("only " + std::to_string(found) + " ones available, needed " +
                std::to_string(wanted)),
          found(found), wanted(wanted) {}
    int code() const noexcept override { return 7; }
    long found;
    long wanted;
};

class empty_sample : public error {
public:
    empty_sample() : error("empty sample list") {}
    int code() const noexcept override { return 8; }
};

// Internal consistency check failed; indicates a bug, not bad input.
class internal_error : public error {
public:
    explicit internal_error(const std::string& msg)
        : error("internal invariant violated: " + msg) {}
    int code() const noexcept override { return 9; }
};

} // namespace gtakagi
