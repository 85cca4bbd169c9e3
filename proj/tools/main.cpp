#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return dyadic::cli::main(argc, argv, std::cin, std::cout, std::cerr);
}
