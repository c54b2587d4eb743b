#include <iostream>

#include "jetsym/cli.hpp"

int main(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return jetsym::cli::run(args, std::cout, std::cerr);
}
