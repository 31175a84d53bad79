#pragma once

// Convergence studies on a manufactured problem: solve on h^{-1} = 2, 4, 8, ..., measure
// errors and observed orders, and emit the table as CSV or markdown.

#include "error_norms.hpp"
#include "hdg_solver.hpp"
#include "mesh.hpp"
#include "postprocess.hpp"
#include "problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdg {

struct ConvergenceRow
{
    int k = 0;
    int h_inv = 0;
    double err_u = 0.0;          // ||u - u_h||
    double err_sigma = 0.0;      // ||sigma - sigma_h||
    double err_sigma_star = 0.0; // ||sigma - sigma*||
    double err_div = 0.0;        // ||div sigma - div sigma*||
    double err_triple = 0.0;     // |||(e_u, e_lambda, e_sigma)|||
    std::optional<double> ord_u, ord_sigma, ord_sigma_star, ord_div, ord_triple;
};

struct ConvergenceTable
{
    std::string problem;
    MeshFamily mesh = MeshFamily::Diagonal;
    std::vector<ConvergenceRow> rows;

    /// Row for (k, h_inv), or nullptr.
    const ConvergenceRow* find(int k, int h_inv) const
    {
        for (const auto& r : rows)
            if (r.k == k && r.h_inv == h_inv)
                return &r;
        return nullptr;
    }
};

struct StudyConfig
{
    std::vector<int> ks{0};
    int levels = 4;
    std::string problem = "paper";
    MeshFamily mesh = MeshFamily::Diagonal;
    /// Multiplier on the error-norm quadrature exactness (1 = default rule).
    int exactness_factor = 1;

    void validate() const
    {
        if (ks.empty())
            throw std::invalid_argument("StudyConfig: no degrees given");
        for (int k : ks)
            HDGConfig{k}.validate();
        if (levels < 1 || levels > 8)
            throw std::invalid_argument("StudyConfig: levels must be in [1, 8], got " + std::to_string(levels));
        if (exactness_factor < 1)
            throw std::invalid_argument("StudyConfig: exactness_factor must be positive");
        problem_by_name(problem);
    }
};

inline ConvergenceRow compute_errors(const HDGSolution& sol, const PostprocessedFlux& flux,
                                     const ManufacturedProblem& problem, const Mesh& mesh, int k,
                                     int exactness_factor = 1)
{
    const int ex = std::min(error_exactness(k) * exactness_factor, kMaxQuadratureExactness);
    ConvergenceRow row;
    row.k = k;
    row.err_u = l2_error(mesh, sol.potential, problem.u, ex);
    row.err_sigma = l2_error(mesh, sol.flux, problem.sigma, ex);
    row.err_sigma_star = l2_error(mesh, flux, problem.sigma, ex);
    row.err_div = divergence_error(mesh, flux, problem.f, ex);
    row.err_triple = triple_norm(error_triple(mesh, sol, problem), mesh, problem);
    return row;
}

inline std::optional<double> observed_order(double coarse, double fine)
{
    if (!(coarse > 0.0) || !(fine > 0.0))
        return std::nullopt;
    return std::log2(coarse / fine);
}

inline ConvergenceTable run_convergence_study(const StudyConfig& config)
{
    config.validate();
    const ManufacturedProblem problem = problem_by_name(config.problem);
    ConvergenceTable table;
    table.problem = config.problem;
    table.mesh = config.mesh;
    for (int k : config.ks) {
        for (int j = 0; j < config.levels; ++j) {
            const int h_inv = 2 << j;
            const Mesh mesh = build_mesh(config.mesh, h_inv);
            const HDGSolution sol = solve_hdg(mesh, HDGConfig{k}, problem);
            const PostprocessedFlux flux = postprocess_flux(mesh, sol);
            ConvergenceRow row = compute_errors(sol, flux, problem, mesh, k, config.exactness_factor);
            row.h_inv = h_inv;
            if (j > 0) {
                const ConvergenceRow& prev = table.rows.back();
                row.ord_u = observed_order(prev.err_u, row.err_u);
                row.ord_sigma = observed_order(prev.err_sigma, row.err_sigma);
                row.ord_sigma_star = observed_order(prev.err_sigma_star, row.err_sigma_star);
                row.ord_div = observed_order(prev.err_div, row.err_div);
                row.ord_triple = observed_order(prev.err_triple, row.err_triple);
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

namespace detail {

inline std::string format_error(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline std::string format_order(const std::optional<double>& v)
{
    if (!v)
        return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

} // namespace detail

inline void write_csv(std::ostream& os, const ConvergenceTable& table)
{
    os << "k,h_inv,err_u,ord_u,err_sigma,ord_sigma,err_sigma_star,ord_sigma_star,err_div,ord_div\n";
    for (const auto& r : table.rows) {
        os << r.k << ',' << r.h_inv << ',' << detail::format_error(r.err_u) << ',' << detail::format_order(r.ord_u)
           << ',' << detail::format_error(r.err_sigma) << ',' << detail::format_order(r.ord_sigma) << ','
           << detail::format_error(r.err_sigma_star) << ',' << detail::format_order(r.ord_sigma_star) << ','
           << detail::format_error(r.err_div) << ',' << detail::format_order(r.ord_div) << '\n';
    }
}

inline void write_markdown(std::ostream& os, const ConvergenceTable& table)
{
    const char* header[] = {"k", "h^-1", "err_u", "order", "err_sigma", "order",
                            "err_sigma_star", "order", "err_div", "order"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : table.rows)
        cells.push_back({std::to_string(r.k), std::to_string(r.h_inv), detail::format_error(r.err_u),
                         detail::format_order(r.ord_u), detail::format_error(r.err_sigma),
                         detail::format_order(r.ord_sigma), detail::format_error(r.err_sigma_star),
                         detail::format_order(r.ord_sigma_star), detail::format_error(r.err_div),
                         detail::format_order(r.ord_div)});
    std::vector<std::size_t> width(10);
    for (int c = 0; c < 10; ++c) {
        width[c] = std::string(header[c]).size();
        for (const auto& row : cells)
            width[c] = std::max(width[c], row[c].size());
    }
    auto line = [&](auto&& cell) {
        os << '|';
        for (int c = 0; c < 10; ++c) {
            const std::string s = cell(c);
            os << ' ' << s << std::string(width[c] - s.size(), ' ') << " |";
        }
        os << '\n';
    };
    line([&](int c) { return std::string(header[c]); });
    line([&](int c) { return std::string(width[c], '-'); });
    for (const auto& row : cells)
        line([&](int c) { return row[c]; });
}

} // namespace hdg
