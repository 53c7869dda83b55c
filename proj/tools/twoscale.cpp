#include <iostream>

#include "twoscale/cli.hpp"

int main(int argc, char** argv)
{
    return twoscale::cli::run({argv, argv + argc}, std::cout, std::cerr);
}
