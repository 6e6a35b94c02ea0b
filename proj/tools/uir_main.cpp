#include "uir/cli.hpp"

int main(int argc, char** argv)
{
    return uir::cli::run(argc, argv);
}
