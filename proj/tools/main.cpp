#include <iostream>
#include "optoresponse/cli.hpp"

int main(int argc, char **argv)
{
  return optoresponse::RunCli(argc, argv, std::cout, std::cerr);
}
