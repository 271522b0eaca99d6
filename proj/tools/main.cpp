#include "dro/cli_app.hpp"

int main(int argc, char** argv) { return dro::run_cli(argc, argv); }
