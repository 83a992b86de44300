#pragma once

#include <array>
#include <charconv>
#include <string>
#include <string_view>

namespace ktfloor::csv {

// RFC 4180 record terminator
inline constexpr std::string_view eol = "\r\n";

/// Scientific notation, 9 significant digits, '.' separator regardless of locale.
inline std::string number(double x)
{
    std::array<char, 48> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::scientific, 8);
    return std::string(buf.data(), res.ptr);
}

/// RFC 4180 field quoting.
inline std::string field(std::string_view s)
{
    if (s.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace ktfloor::csv
