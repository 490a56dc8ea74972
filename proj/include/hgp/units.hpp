// Temperature unit handling: affine conversions between C, F and K.
#pragma once

#include <string>
#include <vector>

namespace hgp {

enum class TempUnit { Celsius, Fahrenheit, Kelvin };

/// Multiplicative part of the Celsius -> unit affine map.
double unit_scale(TempUnit unit);

/// Additive part of the Celsius -> unit affine map.
double unit_offset(TempUnit unit);

/// T_unit = unit_scale * T_celsius + unit_offset
double convert_temperature(double value, TempUnit from, TempUnit to);

std::vector<double> convert_temperature(const std::vector<double>& values,
                                        TempUnit from, TempUnit to);

/// Accepts "C", "F", "K" plus common long spellings; throws InputError otherwise.
TempUnit parse_unit(const std::string& token);

std::string unit_name(TempUnit unit);

}  // namespace hgp
