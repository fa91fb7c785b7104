#include "brane/cli.hpp"

int main(int argc, char** argv) {
    return brane::run_cli(argc, argv);
}
