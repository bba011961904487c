// Writes the bundled synthetic weather and price files.
//
//   gen_synthetic_data [--days N] [--out DIR]

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hvacgrid/data.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate synthetic weather and price series"};
    hvacgrid::data::SyntheticOptions opt;
    std::string out = "data";
    app.add_option("--days", opt.days, "Number of days")->check(CLI::PositiveNumber);
    app.add_option("--out", out, "Output directory");
    CLI11_PARSE(app, argc, argv);

    std::filesystem::create_directories(out);
    std::ofstream w(std::filesystem::path(out) / "weather_synthetic.csv");
    std::ofstream p(std::filesystem::path(out) / "prices_synthetic.csv");
    if (!w || !p) {
        std::cerr << "cannot write into " << out << "\n";
        return 1;
    }
    hvacgrid::data::write_synthetic_weather(w, opt);
    hvacgrid::data::write_synthetic_prices(p, opt);
    return 0;
}
