#include <iostream>

#include "bubblelator/cli.hpp"

int main(int argc, char** argv) {
    return bubblelator::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
