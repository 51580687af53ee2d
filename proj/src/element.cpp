#include "apx/element.hpp"

#include <sstream>

namespace apx {

std::string to_string(const Element& e) {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (auto v : e.lanes) {
    if (!first) os << ',';
    os << v;
    first = false;
  }
  for (const auto& w : e.wide) {
    if (!first) os << ',';
    os << w;
    first = false;
  }
  os << ']';
  return os.str();
}

}  // namespace apx
