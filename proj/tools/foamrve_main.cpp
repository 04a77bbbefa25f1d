////////////////////////////////////////////////////////////////////////////////
// foamrve_main.cpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Command line entry point. Subcommands:
//    generate  build a cell complex and write it out
//    run       solve the configured load cases and post-process
//    sweep     repeat `run` along one config axis
//    analyze   post-process an existing run directory
//    analytic  evaluate the closed-form models
//    plot      render SVG plots from run CSVs
//    verify    check a run directory against its manifest
*/
////////////////////////////////////////////////////////////////////////////////
#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char **argv) {
    CLI::App app{"foamrve: closed-cell foam RVE workbench"};
    app.require_subcommand(1);
    app.add_subcommand("generate", "build a cell complex and write it out");
    app.add_subcommand("run", "solve the configured load cases");
    app.add_subcommand("sweep", "repeat run along one config axis");
    app.add_subcommand("analyze", "post-process an existing run directory");
    app.add_subcommand("analytic", "evaluate the closed-form models");
    app.add_subcommand("plot", "render SVG plots from run CSVs");
    app.add_subcommand("verify", "check a run directory against its manifest");
    CLI11_PARSE(app, argc, argv);
    std::fprintf(stderr, "not implemented yet\n");
    return 1;
}
