#include <knncp/cli.hpp>

#include <iostream>

int main(int argc, char** argv) {
    return knncp::run_cli(argc, argv, std::cout, std::cerr);
}
