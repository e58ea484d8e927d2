#include <iostream>

#include "topicnet/cli.hpp"

int main(int argc, char** argv) { return topicnet::run_cli(argc, argv, std::cout, std::cerr); }
