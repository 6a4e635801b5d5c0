#pragma once

// Human-facing quantity strings ("190g", "130 Wh/kg", "22.8min") to SI values.
// A missing or unknown unit suffix is always an error.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace staged {

class UnitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Dimension { Mass, SpecificEnergy, Time, Velocity };

/// Accepted suffixes: g, kg | Wh/kg, J/kg | min, s | m/s. Returns kg, J/kg, s or m/s.
double parse_quantity(std::string_view text, Dimension dimension);

/// Comma-separated quantities, e.g. "190g,135g".
std::vector<double> parse_quantity_list(std::string_view text, Dimension dimension);

/// Plain number without unit (coefficients whose unit is fixed by the key name).
double parse_number(std::string_view text);

/// Shortest round-trip representation of si / unit_scale followed by " unit".
std::string format_quantity(double si_value, std::string_view unit);

}  // namespace staged
