#include "tapered/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return tapered::run_cli(argc, argv, std::cout, std::cerr);
}
