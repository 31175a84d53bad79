// Solve the variable-coefficient model problem with k = 1 on a sequence of meshes and print
// the errors of u_h, sigma_h and the postprocessed flux.

#include <hdg/hdg.hpp>

#include <cstdio>

int main()
{
    const hdg::ManufacturedProblem problem = hdg::sine_problem();
    const hdg::HDGConfig config{1};
    std::printf("%6s %8s %12s %12s %12s %12s\n", "h^-1", "elements", "|u-u_h|", "|s-s_h|", "|s-s*|", "jump(s*.n)");
    hdg::Mesh mesh = hdg::build_structured_mesh(2);
    for (int level = 0; level < 4; ++level) {
        const hdg::HDGSolution sol = hdg::solve_hdg(mesh, config, problem);
        const hdg::PostprocessedFlux flux = hdg::postprocess_flux(mesh, sol);
        const hdg::ConvergenceRow row = hdg::compute_errors(sol, flux, problem, mesh, config.k);
        std::printf("%6d %8d %12.3e %12.3e %12.3e %12.3e\n", 2 << level, mesh.num_elements(), row.err_u,
                    row.err_sigma, row.err_sigma_star, hdg::max_normal_jump(mesh, flux));
        mesh = hdg::refine_uniform(mesh);
    }
    return 0;
}
