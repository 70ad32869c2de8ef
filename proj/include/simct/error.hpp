// Copyright 2026 The SimCT Toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace simct {

// Root of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidData : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class SerializationError : public Error {
 public:
  using Error::Error;
};

// Embedding provider transport/format failures.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// A single generation request failed (transport, auth, malformed body).
class GenerationError : public Error {
 public:
  using Error::Error;
};

class JudgeError : public Error {
 public:
  using Error::Error;
};

// A collection run lost too many queries to be usable.
class RunError : public Error {
 public:
  using Error::Error;
};

}  // namespace simct
