// Copyright (c) 2026 The cachegram authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cachegram {

/// File could not be opened, read or written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// A model or question file violates its format.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// The corpus yields an empty vocabulary after frequency filtering.
struct NoTrainableWords : std::runtime_error {
    NoTrainableWords() : std::runtime_error("no trainable words") {}
};

}  // namespace cachegram
