#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "supercohom/cli.hpp"

namespace {

// write to a temp file in the target directory, then rename into place
void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw supercohom::UsageError("cannot open output file: " + path);
        out << content;
        if (!out) throw supercohom::UsageError("failed writing output file: " + path);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw supercohom::UsageError("cannot move output into place: " + path);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"supercohom: exact cohomology of graded Lie superalgebras of vector fields"};
    std::string jobfile, out_path, format_name;
    int threads = 1;
    app.add_option("jobfile", jobfile, "job file (header 'supercohom-job v1')")->required();
    app.add_option("--out", out_path, "write the report here instead of stdout");
    app.add_option("--format", format_name, "override the job's output format")
        ->check(CLI::IsMember({"ascii", "latex", "machine"}));
    app.add_option("--threads", threads, "worker threads for multi-cell jobs")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::ifstream in(jobfile, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot open job file: " << jobfile << "\n";
            return 1;
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        supercohom::JobSpec spec = supercohom::parse_job(buf.str());
        std::optional<supercohom::OutputFormat> fmt;
        if (!format_name.empty()) fmt = supercohom::parse_output_format(format_name);
        std::string report = supercohom::run_job(spec, fmt, threads);
        if (out_path.empty())
            std::cout << report;
        else
            write_atomic(out_path, report);
        return 0;
    } catch (const supercohom::InternalError& e) {
        std::cerr << "internal consistency failure: " << e.what() << "\n";
        return 3;
    } catch (const supercohom::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 2;
    }
}
