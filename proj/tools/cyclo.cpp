#include <iostream>

#include "cyclo/cli.hpp"

int main(int argc, char** argv)
{
    std::ios::sync_with_stdio(false);
    return cyclo::cli::run(argc, argv, std::cout, std::cerr);
}
