// Standalone decision procedure for the SMT-LIB2 fragment the encoders
// produce (see include/nave/smtsolve.hpp). Reads the script from a file
// argument or stdin, prints sat/unsat/unknown and, on sat, the get-value
// response. Accepts and ignores the --ff=split / --ff=gb configuration
// flags so it is a drop-in target for the backend configurations.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "nave/smtsolve.hpp"

int main(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--ff=split" || arg == "--ff=gb") {
            continue;  // configuration hints; one strategy serves both
        }
        if (arg == "--help" || arg == "-h") {
            std::cout << "usage: navesolve [--ff=split|--ff=gb] [script.smt2]\n"
                         "reads SMT-LIB2 from the file argument or stdin\n";
            return 0;
        }
        if (!arg.empty() && arg[0] == '-') {
            std::cerr << "navesolve: ignoring unknown flag " << arg << "\n";
            continue;
        }
        if (!path.empty()) {
            std::cerr << "navesolve: multiple input files\n";
            return 1;
        }
        path = arg;
    }

    std::string text;
    if (path.empty()) {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        text = buf.str();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            std::cout << "(error \"cannot read " << path << "\")\n";
            return 1;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }

    auto out = nave::smtsolve::run_script(text);
    std::cout << out.stdout_text;
    if (out.result.answer == nave::smtsolve::Answer::Unknown && !out.result.reason.empty()) {
        std::cerr << "navesolve: " << out.result.reason << "\n";
    }
    return 0;
}
