#include <string>
#include <vector>

#include "spdt/cli.hpp"

int main(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return spdt::run_cli(args);
}
