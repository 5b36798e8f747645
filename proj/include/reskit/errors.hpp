#pragma once

#include <stdexcept>
#include <string>

namespace reskit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input names a label that does not belong to the relevant set.
class LabelError : public Error {
public:
    using Error::Error;
};

/// Index ranges or sequence lengths are inconsistent.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The model cannot answer a query (e.g. a transition entry is missing).
class ModelError : public Error {
public:
    using Error::Error;
};

/// A policy table has no entry for a reachable (time, state, prefix).
class StrategyDomainError : public Error {
public:
    using Error::Error;
};

/// A bundle does not cover a scenario required by a regime or risk measure.
class MissingScenarioError : public Error {
public:
    using Error::Error;
};

/// An enumeration would exceed the configured budget. Carries the exact size.
class BudgetError : public Error {
public:
    BudgetError(const std::string& what, unsigned long long count)
        : Error(what), count_(count) {}
    unsigned long long count() const noexcept { return count_; }

private:
    unsigned long long count_;
};

/// A solver was asked for a method its inputs do not support.
class UnsupportedModelError : public Error {
public:
    using Error::Error;
};

/// Risk minimization was requested from a non-resilient state.
class NoResilientStrategyError : public Error {
public:
    using Error::Error;
};

/// Input file is syntactically or structurally invalid.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace reskit
