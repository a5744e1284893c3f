#ifndef RESIST_ACCEPTANCE_HPP
#define RESIST_ACCEPTANCE_HPP

#include <ostream>

namespace resist {

// Runs the full verification battery, one PASS/FAIL line per criterion.
// Returns the number of failed criteria (0 when everything passes).
int run_acceptance_battery(std::ostream& out);

}  // namespace resist

#endif
