#include <shallowcv/app.hpp>

int main(int argc, char** argv) { return shallowcv::app::run_cli(argc, argv); }
