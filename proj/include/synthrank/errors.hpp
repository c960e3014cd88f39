//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_ERRORS_HPP
#define SYNTHRANK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace synthrank {

// What made a SMILES string unacceptable. Kept separate from the message so
// the data pipeline can count rejections per reason.
enum class ParseErrorKind {
  kSyntax,
  kUnsupportedElement,
  kUnsupportedFeature,
  kValence,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ParseErrorKind kind() const { return kind_; }

 private:
  ParseErrorKind kind_;
};

class ValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace synthrank

#endif
