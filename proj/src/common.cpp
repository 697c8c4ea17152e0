#include "mlmmsb/common.hpp"

#include <cctype>
#include <string>

namespace mlmmsb {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::SPSum: return "spsum";
    case Method::SPDSoS: return "spdsos";
    case Method::SPSoS: return "spsos";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  std::string lower(name);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Method m : kAllMethods) {
    if (lower == method_name(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "' (expected spsum, spdsos or spsos)");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace mlmmsb
