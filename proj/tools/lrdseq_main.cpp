#include <string>
#include <vector>

#include "lrdseq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lrdseq::run_cli(args);
}
