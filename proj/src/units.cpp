#include "staged/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace staged {
namespace {

struct Suffix {
    std::string_view text;
    Dimension dimension;
    double to_si;
};

constexpr std::array kSuffixes{
    Suffix{"kg", Dimension::Mass, 1.0},
    Suffix{"g", Dimension::Mass, 1e-3},
    Suffix{"Wh/kg", Dimension::SpecificEnergy, 3600.0},
    Suffix{"J/kg", Dimension::SpecificEnergy, 1.0},
    Suffix{"min", Dimension::Time, 60.0},
    Suffix{"s", Dimension::Time, 1.0},
    Suffix{"m/s", Dimension::Velocity, 1.0},
};

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string_view dimension_name(Dimension d) {
    switch (d) {
        case Dimension::Mass:
            return "mass (g, kg)";
        case Dimension::SpecificEnergy:
            return "specific energy (Wh/kg, J/kg)";
        case Dimension::Time:
            return "time (min, s)";
        case Dimension::Velocity:
            return "velocity (m/s)";
    }
    return "?";
}

// Splits "12.5 g" into (12.5, "g").
std::pair<double, std::string_view> split_number(std::string_view text) {
    text = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr == text.data()) {
        throw UnitError(fmt::format("'{}' does not start with a number", text));
    }
    if (!std::isfinite(value)) {
        throw UnitError(fmt::format("'{}' is not a finite number", text));
    }
    const auto consumed = static_cast<std::size_t>(ptr - text.data());
    return {value, trim(text.substr(consumed))};
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dimension) {
    const auto [value, unit] = split_number(text);
    if (unit.empty()) {
        throw UnitError(fmt::format("'{}' has no unit; expected {}", trim(text), dimension_name(dimension)));
    }
    for (const auto& s : kSuffixes) {
        if (s.text == unit) {
            if (s.dimension != dimension) {
                throw UnitError(fmt::format("unit '{}' in '{}' is not a {}", unit, trim(text), dimension_name(dimension)));
            }
            return value * s.to_si;
        }
    }
    throw UnitError(fmt::format("unknown unit '{}' in '{}'; expected {}", unit, trim(text), dimension_name(dimension)));
}

std::vector<double> parse_quantity_list(std::string_view text, Dimension dimension) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(parse_quantity(text.substr(0, comma), dimension));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

double parse_number(std::string_view text) {
    const auto [value, rest] = split_number(text);
    if (!rest.empty()) {
        throw UnitError(fmt::format("unexpected trailing text '{}' after number", rest));
    }
    return value;
}

std::string format_quantity(double si_value, std::string_view unit) {
    for (const auto& s : kSuffixes) {
        if (s.text == unit) {
            return fmt::format("{} {}", si_value / s.to_si, unit);
        }
    }
    throw UnitError(fmt::format("unknown unit '{}'", unit));
}

}  // namespace staged
