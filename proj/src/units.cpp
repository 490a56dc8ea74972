#include "hgp/units.hpp"

#include <algorithm>
#include <cctype>

#include "hgp/errors.hpp"

namespace hgp {

double unit_scale(TempUnit unit) {
  switch (unit) {
    case TempUnit::Celsius: return 1.0;
    case TempUnit::Fahrenheit: return 1.8;
    case TempUnit::Kelvin: return 1.0;
  }
  return 1.0;
}

double unit_offset(TempUnit unit) {
  switch (unit) {
    case TempUnit::Celsius: return 0.0;
    case TempUnit::Fahrenheit: return 32.0;
    case TempUnit::Kelvin: return 273.15;
  }
  return 0.0;
}

double convert_temperature(double value, TempUnit from, TempUnit to) {
  if (from == to) return value;
  const double celsius = (value - unit_offset(from)) / unit_scale(from);
  return celsius * unit_scale(to) + unit_offset(to);
}

std::vector<double> convert_temperature(const std::vector<double>& values,
                                        TempUnit from, TempUnit to) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = convert_temperature(values[i], from, to);
  return out;
}

TempUnit parse_unit(const std::string& token) {
  std::string t;
  for (char ch : token) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (t == "c" || t == "celsius" || t == "centigrade") return TempUnit::Celsius;
  if (t == "f" || t == "fahrenheit") return TempUnit::Fahrenheit;
  if (t == "k" || t == "kelvin" || t == "kelvins") return TempUnit::Kelvin;
  throw InputError("unknown temperature unit token: '" + token + "'");
}

std::string unit_name(TempUnit unit) {
  switch (unit) {
    case TempUnit::Celsius: return "C";
    case TempUnit::Fahrenheit: return "F";
    case TempUnit::Kelvin: return "K";
  }
  return "?";
}

}  // namespace hgp
