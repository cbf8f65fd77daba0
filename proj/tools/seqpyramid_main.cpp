#include <iostream>
#include <string>
#include <vector>

#include "seqpyr/report.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return seqpyr::cli_run(args, std::cout, std::cerr);
}
