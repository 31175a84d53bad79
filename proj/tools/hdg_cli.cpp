// hdg: convergence studies and invariant checks from the command line.
//
//   hdg run   --k 0,1 --levels 5 --problem paper --mesh diagonal --format csv --out table.csv
//   hdg check --k 1
//
// Either subcommand accepts --config FILE with key=value lines naming the same options
// (k=1, levels=4, ...); options given on the command line take precedence.
// Exit status: 0 success, 1 invariant or numerical failure, 2 bad input.

#include "hdg/hdg.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitBadInput = 2;

struct BadInput : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Fill options of `sub` that were not given on the command line from a key=value file.
void apply_config_file(CLI::App& sub, const std::string& path)
{
    std::ifstream probe(path);
    if (!probe)
        throw BadInput("cannot open config file '" + path + "'");
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
        if (!item.parents.empty())
            throw BadInput("config file: sections are not supported ('" + item.fullname() + "')");
        if (item.name == "config")
            throw BadInput("config file: 'config' cannot be set from a config file");
        CLI::Option* opt = sub.get_option_no_throw("--" + item.name);
        if (opt == nullptr)
            throw BadInput("config file: unknown key '" + item.name + "' for '" + sub.get_name() + "'");
        if (opt->count() > 0)
            continue;
        for (const std::string& v : item.inputs)
            opt->add_result(v);
        opt->run_callback();
    }
}

int run_study(const hdg::StudyConfig& config, const std::string& format, const std::string& out_path)
{
    const hdg::ConvergenceTable table = hdg::run_convergence_study(config);
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file)
            throw BadInput("cannot write '" + out_path + "'");
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    if (format == "md")
        hdg::write_markdown(os, table);
    else
        hdg::write_csv(os, table);
    return 0;
}

int run_checks(const std::vector<int>& ks)
{
    bool ok = true;
    for (int k : ks) {
        for (const hdg::CheckResult& r : hdg::run_invariant_checks(k)) {
            std::printf("%s  k=%d  %-68s %10.3e (limit %.1e)%s%s\n", r.passed ? "PASS" : "FAIL", k, r.name.c_str(),
                        r.value, r.threshold, r.detail.empty() ? "" : "  ", r.detail.c_str());
            ok = ok && r.passed;
        }
    }
    return ok ? 0 : kExitFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"HDG solver: convergence studies and invariant checks"};
    app.require_subcommand(1);

    hdg::StudyConfig study;
    std::vector<int> run_ks{0};
    std::string mesh_name = "diagonal";
    std::string format = "csv";
    std::string out_path;
    std::string run_config;

    CLI::App* run = app.add_subcommand("run", "Run a convergence study and print the error table");
    run->add_option("--k", run_ks, "Degrees (comma separated)")->delimiter(',')->check(CLI::Range(0, hdg::kMaxHdgDegree));
    run->add_option("--levels", study.levels, "Number of meshes, h^-1 = 2, 4, 8, ...")->check(CLI::Range(1, 8));
    run->add_option("--problem", study.problem, "Manufactured problem")->check(CLI::IsMember(hdg::problem_names()));
    run->add_option("--mesh", mesh_name, "Mesh family")->check(CLI::IsMember({"diagonal", "crisscross"}));
    run->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "md"}));
    run->add_option("--out", out_path, "Output file (default: stdout)");
    run->add_option("--config", run_config, "key=value file supplying any of the options above");

    std::vector<int> check_ks{0};
    std::string check_config;
    CLI::App* check = app.add_subcommand("check", "Run the invariant suite; nonzero exit on any failure");
    check->add_option("--k", check_ks, "Degrees (comma separated)")->delimiter(',')->check(CLI::Range(0, hdg::kMaxHdgDegree));
    check->add_option("--config", check_config, "key=value file supplying any of the options above");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            if (!run_config.empty())
                apply_config_file(*run, run_config);
            study.ks = run_ks;
            study.mesh = hdg::mesh_family_by_name(mesh_name);
            study.validate();
            return run_study(study, format, out_path);
        }
        if (!check_config.empty())
            apply_config_file(*check, check_config);
        for (int k : check_ks)
            hdg::HDGConfig{k}.validate();
        return run_checks(check_ks);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadInput;
    } catch (const BadInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    } catch (const hdg::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kExitFailure;
    }
}
