#include <iostream>

#include "monoiter/app.hpp"

int main(int argc, char** argv) { return monoiter::app::run(argc, argv, std::cout, std::cerr); }
