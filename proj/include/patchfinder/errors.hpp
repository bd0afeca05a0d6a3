#pragma once

#include <stdexcept>
#include <string>

namespace patchfinder {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rect outside the image, bad crop, etc.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Image bytes could not be decoded or encoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Nothing left to average after stop-token exclusion.
class EmptySequenceError : public Error {
 public:
  EmptySequenceError() : Error("empty sequence: no tokens to score") {}
};

// Normalization of an answer that passed its filter chain failed.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

// Connection refused, timeout, 5xx. Safe to retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Response does not follow the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Backend answered but declined to produce a completion.
class BackendRefusal : public Error {
 public:
  using Error::Error;
};

// Every patch of a run failed at the transport level.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace patchfinder
