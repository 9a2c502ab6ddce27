#include <string>
#include <vector>

#include "torph/cli.hpp"

int main(int argc, char** argv) {
    return torph::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
