#pragma once

#include <vector>

#include "cmj/measures.hpp"

namespace cmj::testing {

// Ten sticks whose forest is a single tree completed by the last stick.
inline std::vector<Stick> fixture_sticks() {
  return {
      Stick(2.0, {1.5, 0.5}), Stick(1.5, {1.2, 0.5}), Stick(1.5, {0.9}),        Stick(1.0, {}),
      Stick(2.0, {}),         Stick(4.0, {3.5, 2.5, 1.0}), Stick(2.0, {}),      Stick(1.0, {}),
      Stick(1.0, {1.0}),      Stick(1.0, {}),
  };
}

}  // namespace cmj::testing
