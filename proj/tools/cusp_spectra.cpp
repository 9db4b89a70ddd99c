#include "app.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return cusp::app::main_entry(argc, argv, std::cout, std::cerr);
}
