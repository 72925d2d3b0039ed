#pragma once

// Explicit stacked operators over all leaf paths: every path contributes its
// rows, so rows shared by several paths appear several times.

#include "treekz/system.hpp"

namespace treekz::testkit {

struct Stacked {
  Matrix S;
  Vector b;
  Matrix D;
  Matrix L;
  /// Leaf weight of the path each stacked row belongs to, on the diagonal.
  Matrix W;
};

Stacked stack(const TreeSystem& system);

}  // namespace treekz::testkit
