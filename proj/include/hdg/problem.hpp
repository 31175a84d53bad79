#pragma once

// Model problem  c sigma - grad u = 0,  -div sigma = f  in the unit square,  u = g on the boundary.

#include "mesh.hpp"
#include "projection.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdg {

/// Data the discretisation needs.
struct ProblemData
{
    MatrixFunction c;
    ScalarFunction f;
    ScalarFunction g;
};

/// Problem with a closed-form solution, used for convergence studies.
struct ManufacturedProblem : ProblemData
{
    std::string name;
    ScalarFunction u;
    VectorFunction grad_u;
    VectorFunction sigma;
};

/// u = sin(pi x) sin(pi y),  c = (1 + x^2 y^2) I.
inline ManufacturedProblem sine_problem()
{
    using std::numbers::pi;
    ManufacturedProblem p;
    p.name = "paper";
    p.u = [](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); };
    p.grad_u = [](const Point& x) {
        return Vec2(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                    pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
    };
    p.c = [](const Point& x) -> Mat2 {
        const double w = 1.0 + x.x() * x.x() * x.y() * x.y();
        return w * Mat2::Identity();
    };
    p.sigma = [grad = p.grad_u](const Point& x) -> Vec2 {
        return grad(x) / (1.0 + x.x() * x.x() * x.y() * x.y());
    };
    // -div(grad u / w) = -lap(u)/w + grad(w).grad(u)/w^2 with lap(u) = -2 pi^2 u
    p.f = [u = p.u, grad = p.grad_u](const Point& x) {
        const double w = 1.0 + x.x() * x.x() * x.y() * x.y();
        const Vec2 grad_w(2.0 * x.x() * x.y() * x.y(), 2.0 * x.x() * x.x() * x.y());
        return 2.0 * pi * pi * u(x) / w + grad_w.dot(grad(x)) / (w * w);
    };
    p.g = [](const Point&) { return 0.0; };
    return p;
}

/// u = x + y with c = scale * I; sigma = (1,1)/scale, f = 0.
inline ManufacturedProblem linear_problem(double scale = 1.0)
{
    ManufacturedProblem p;
    p.name = "linear";
    p.u = [](const Point& x) { return x.x() + x.y(); };
    p.grad_u = [](const Point&) { return Vec2(1.0, 1.0); };
    p.c = [scale](const Point&) -> Mat2 { return scale * Mat2::Identity(); };
    p.sigma = [scale](const Point&) -> Vec2 { return Vec2(1.0, 1.0) / scale; };
    p.f = [](const Point&) { return 0.0; };
    p.g = p.u;
    return p;
}

inline const std::vector<std::string>& problem_names()
{
    static const std::vector<std::string> names{"paper", "linear"};
    return names;
}

inline ManufacturedProblem problem_by_name(const std::string& name)
{
    if (name == "paper")
        return sine_problem();
    if (name == "linear")
        return linear_problem();
    throw std::invalid_argument("unknown problem '" + name + "' (expected paper|linear)");
}

} // namespace hdg
