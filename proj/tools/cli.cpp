// Command-line front end. Subcommands are registered as the corresponding
// engine becomes available; see README for usage.

#include "CLI11.hpp"

#include "srg/dp.hpp"
#include "srg/io.hpp"
#include "srg/oracle.hpp"

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"exact solver toolkit for generalized domination"};
    app.require_subcommand(1);

    std::string in_path, engine = "auto";
    auto* count = app.add_subcommand("count", "count solutions of an srg instance");
    count->add_option("input", in_path, "srg file")->required();
    count->add_option("--engine", engine, "auto|oracle|dp");

    CLI11_PARSE(app, argc, argv);

    try {
        if (count->parsed()) {
            std::ifstream in(in_path);
            if (!in) throw std::runtime_error("cannot open " + in_path);
            srg::SrgFile f = srg::parse_srg(in);
            srg::Rat r;
            if (engine == "dp" || (engine == "auto" && f.pd)) {
                if (!f.pd) throw std::runtime_error("dp engine requires bag lines");
                r = srg::count_dp_weighted(f.inst, *f.pd);
            } else {
                r = srg::count_sets_weighted(f.inst);
            }
            std::cout << srg::io_detail::rat_str(r) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
