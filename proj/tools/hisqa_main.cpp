#include <iostream>
#include <string>
#include <vector>

#include "hisqa/pipeline.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return hisqa::run_cli(args, std::cout, std::cerr);
}
