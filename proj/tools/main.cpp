#include <iostream>

#include "chemsens/cli.hpp"

int main(int argc, char** argv)
{
    return chemsens::cli::run(argc, argv, std::cout, std::cerr);
}
