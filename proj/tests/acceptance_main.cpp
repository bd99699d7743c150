#include "mudflow/acceptance.hpp"

#include <iostream>

int main() {
    const auto results = mudflow::acceptance::run_all(std::cout);
    return mudflow::acceptance::all_passed(results) ? 0 : 1;
}
