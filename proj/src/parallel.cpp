#include "nat2/parallel.hpp"

#include <cstdlib>
#include <string>

namespace nat2 {

int max_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* raw = std::getenv("NA_T2_THREADS")) {
    try {
      const int cap = std::stoi(raw);
      if (cap >= 1) hw = std::min(hw, cap);
    } catch (...) {
      // unparsable value: keep the hardware default
    }
  }
  return hw;
}

}  // namespace nat2
