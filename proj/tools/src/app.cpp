#include "gkflow/errors.hpp"
#include "gkflow_cli/app.hpp"

#include "CLI11.hpp"

#include <ostream>

namespace gkflow::cli {

namespace {

void add_common(CLI::App& sub, RunConfig& c, std::optional<int>& grid, std::optional<double>& h,
                std::optional<double>& dt, std::optional<double>& tol, std::optional<std::uint64_t>& seed) {
    sub.add_option("--out", c.out_dir, "Output directory for JSON/CSV reports");
    sub.add_option("--grid", grid, "Grid points per axis (flow)");
    sub.add_option("--h", h, "Finite-difference step");
    sub.add_option("--dt", dt, "Flow integrator step");
    sub.add_option("--tol", tol, "Residual tolerance override");
    sub.add_option("--seed", seed, "Random seed");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Generalized Kähler structures: algebra checks, dictionary, flows and Lie classification", "gkflow"};
    app.require_subcommand(1);
    // -h would clash with the --h step option; subcommands inherit this.
    app.set_help_flag("--help", "Print this help message and exit");

    RunConfig c;
    std::optional<int> grid;
    std::optional<double> h, dt, tol;
    std::optional<std::uint64_t> seed;
    std::vector<double> times;
    std::string fault;

    CLI::App* algebra = app.add_subcommand("algebra", "Generalized complex and Dirac-structure invariant suite");
    add_common(*algebra, c, grid, h, dt, tol, seed);
    algebra->add_option("--n", c.n, "Largest complex dimension (1-4)");
    algebra->add_option("--samples", c.samples, "Samples per dimension");
    algebra->add_option("--inject-fault", fault, "Test hook")->check(CLI::IsMember({"sign-flip"}));

    CLI::App* dictionary = app.add_subcommand("dictionary", "Bi-Hermitian / generalized Kähler round trips");
    add_common(*dictionary, c, grid, h, dt, tol, seed);
    dictionary->add_option("--n", c.n, "Largest complex dimension (1-4)");
    dictionary->add_option("--samples", c.samples, "Samples per dimension");
    dictionary->add_flag("--degenerate", c.degenerate, "Also exercise the degenerate-metric refusals");

    CLI::App* flow = app.add_subcommand("flow", "Deform a scenario along its potential flow and verify it");
    add_common(*flow, c, grid, h, dt, tol, seed);
    flow->add_option("--scenario", c.input, "Built-in scenario name or JSON scenario file")->required();
    flow->add_option("--t", times, "Deformation time(s)");
    flow->add_flag("--window", c.window, "Print the positivity window");
    flow->add_option("--t-hi", c.t_hi, "Upper end of the positivity window search");

    CLI::App* lie = app.add_subcommand("lie", "Root-sum criterion and blow-up eligibility");
    add_common(*lie, c, grid, h, dt, tol, seed);
    lie->add_option("--group", c.group, "Factors, e.g. \"u1:2,su2:2\" or \"u1:1,su2:1,A2\"");
    lie->add_option("--Y", c.y, "Torus submanifold, e.g. \"pt x T^2\", \"Z^1 x T^2\", \"T\"");
    lie->add_option("--roots", c.roots, "Root datum, e.g. A2 or B2xA1");
    lie->add_flag("--scan-table", c.scan_table, "Scan all supported root data");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::input_error);
    }

    c.overrides = {grid, h, dt, tol, seed, times.empty() ? std::nullopt : std::optional(times)};
    c.inject_sign_flip = fault == "sign-flip";
    for (CLI::App* sub : {algebra, dictionary, flow, lie})
        if (sub->parsed()) c.command = sub->get_name();

    try {
        validate(c);
        ExitCode code = ExitCode::ok;
        if (c.command == "algebra") code = cmd_algebra_check(c, out);
        else if (c.command == "dictionary") code = cmd_dictionary(c, out);
        else if (c.command == "flow") code = cmd_flow(c, out);
        else code = cmd_lie(c, out);
        return static_cast<int>(code);
    } catch (const InputError& e) {
        err << "gkflow: " << e.what() << "\n";
        return static_cast<int>(ExitCode::input_error);
    } catch (const ParseError& e) {
        err << "gkflow: " << e.what() << "\n";
        return static_cast<int>(ExitCode::input_error);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "gkflow: " << e.what() << "\n";
        return static_cast<int>(ExitCode::input_error);
    } catch (const Error& e) {
        err << "gkflow: verification aborted: " << e.what() << "\n";
        return static_cast<int>(ExitCode::verification_failure);
    } catch (const std::exception& e) {
        err << "gkflow: internal error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::verification_failure);
    }
}

}  // namespace gkflow::cli
