#pragma once

#include <stdexcept>
#include <string>

namespace ctxmine {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed line in a line-delimited file. Carries the 1-based line number.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, int line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class EmptyCorpus : public Error {
public:
    using Error::Error;
};

class EmptySequence : public Error {
public:
    using Error::Error;
};

class EmptyPool : public Error {
public:
    using Error::Error;
};

class EmptyUnion : public Error {
public:
    using Error::Error;
};

class UnknownMethod : public Error {
public:
    using Error::Error;
};

class MethodOverBudget : public Error {
public:
    using Error::Error;
};

class RelevantMissing : public Error {
public:
    using Error::Error;
};

class MissingInstance : public Error {
public:
    using Error::Error;
};

class PositiveLogLik : public Error {
public:
    using Error::Error;
};

// A model is missing a prediction for an instance it must cover.
class CoverageGap : public Error {
public:
    CoverageGap(std::string model, std::string instance_id)
        : Error("model '" + model + "' has no prediction for instance '" + instance_id + "'"),
          model_(std::move(model)),
          instance_id_(std::move(instance_id)) {}
    const std::string& model() const { return model_; }
    const std::string& instance_id() const { return instance_id_; }

private:
    std::string model_;
    std::string instance_id_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ctxmine
