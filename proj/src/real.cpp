#include "momentwave/real.hpp"

namespace momentwave {

Real to_real(const Rational& q) { return Real(q.get_num().get_str()) / Real(q.get_den().get_str()); }

}  // namespace momentwave
