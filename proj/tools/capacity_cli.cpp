#include <iostream>

#include "capacity/cli.hpp"

int main(int argc, char** argv)
{
    return capacity::run_cli(argc, argv, std::cout, std::cerr);
}
