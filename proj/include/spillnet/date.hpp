#pragma once

#include <compare>
#include <string>

namespace spillnet {

/// Calendar date (frequency-agnostic: the loader does not care whether the
/// panel is monthly or daily).
struct Date {
    int year = 0;
    int month = 0; // 1..12
    int day = 0;   // 1..31

    auto operator<=>(const Date&) const = default;

    /// Parse "YYYY-MM-DD". Throws DataError on anything else.
    static Date parse(const std::string& text);

    std::string to_string() const;
};

} // namespace spillnet
