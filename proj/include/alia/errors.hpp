// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace alia {

// Carries a stable machine-readable code ("malformed-profile", "bad-frame",
// "unknown-function", ...) next to the human message. Codes are part of the
// public contract; messages are not.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace alia
