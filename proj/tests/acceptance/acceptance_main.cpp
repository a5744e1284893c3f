#include <iostream>

#include "resist/acceptance.hpp"

int main() { return resist::run_acceptance_battery(std::cout) == 0 ? 0 : 1; }
