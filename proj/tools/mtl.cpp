#include <iostream>

#include "mtl/app.hpp"

int main(int argc, char** argv) { return mtl::run(argc, argv, std::cout, std::cerr); }
