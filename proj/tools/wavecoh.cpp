#include <iostream>
#include <string>
#include <vector>

#include "wavecoh/cli.hpp"

int main(int argc, char** argv) {
    return wavecoh::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
