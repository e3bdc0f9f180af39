#include "fcit/cli.hpp"

int main(int argc, char** argv) {
    return fcit::run_cli(argc, argv);
}
