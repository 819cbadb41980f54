// Copyright (c) the alia contributors
// SPDX-License-Identifier: Apache-2.0
//
// Textual CAN frame grammar: `HEXID#HEXDATA`. The ID is exactly 3 hex digits
// (11-bit standard frame, <= 0x7FF) or exactly 8 (29-bit extended frame,
// <= 0x1FFFFFFF). DATA is 0..16 hex digits of even length (0..8 payload
// bytes). Either case parses; printing always produces uppercase, so
// format(parse(t)) == uppercase(t) and uppercase text round-trips exactly.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alia/errors.hpp"

namespace alia {

struct CanFrame {
    std::uint32_t id = 0;
    std::vector<std::uint8_t> data;
    bool extended = false;

    bool operator==(const CanFrame&) const = default;

    std::string to_text() const {
        static const char* hex = "0123456789ABCDEF";
        std::string out;
        int id_digits = extended ? 8 : 3;
        for (int i = id_digits - 1; i >= 0; --i)
            out += hex[(id >> (4 * i)) & 0xF];
        out += '#';
        for (std::uint8_t byte : data) {
            out += hex[byte >> 4];
            out += hex[byte & 0xF];
        }
        return out;
    }
};

namespace detail {

inline int hex_digit(char c) {
    if (c >= '0' && c <= '9')
        return c - '0';
    if (c >= 'A' && c <= 'F')
        return c - 'A' + 10;
    if (c >= 'a' && c <= 'f')
        return c - 'a' + 10;
    return -1;
}

} // namespace detail

/// Parses `HEXID#HEXDATA`, or nullopt when the text does not fit the grammar.
inline std::optional<CanFrame> try_parse_can_frame(const std::string& text) {
    std::size_t hash = text.find('#');
    if (hash == std::string::npos)
        return std::nullopt;
    std::string_view id_part(text.data(), hash);
    std::string_view data_part(text.data() + hash + 1, text.size() - hash - 1);
    if (id_part.size() != 3 && id_part.size() != 8)
        return std::nullopt;
    CanFrame frame;
    frame.extended = id_part.size() == 8;
    for (char c : id_part) {
        int d = detail::hex_digit(c);
        if (d < 0)
            return std::nullopt;
        frame.id = frame.id << 4 | static_cast<std::uint32_t>(d);
    }
    if (frame.id > (frame.extended ? 0x1FFFFFFFu : 0x7FFu))
        return std::nullopt;
    if (data_part.size() % 2 != 0 || data_part.size() > 16)
        return std::nullopt;
    for (std::size_t i = 0; i < data_part.size(); i += 2) {
        int hi = detail::hex_digit(data_part[i]);
        int lo = detail::hex_digit(data_part[i + 1]);
        if (hi < 0 || lo < 0)
            return std::nullopt;
        frame.data.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return frame;
}

/// Throwing variant; the error code is `bad-frame`.
inline CanFrame parse_can_frame(const std::string& text) {
    if (std::optional<CanFrame> frame = try_parse_can_frame(text))
        return *std::move(frame);
    throw Error("bad-frame", "not a valid CAN frame: '" + text +
                                 "' (expected HEXID#HEXDATA with a 3- or 8-digit "
                                 "hex ID and an even-length payload of up to 8 bytes)");
}

} // namespace alia
