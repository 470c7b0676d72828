#pragma once

namespace casimir {

// Li_2(x) for -1 <= x <= 1.
double dilog(double x);

}  // namespace casimir
