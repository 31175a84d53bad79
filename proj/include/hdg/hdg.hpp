#pragma once

// Umbrella header.

#include "basis.hpp"
#include "checks.hpp"
#include "convergence.hpp"
#include "error_norms.hpp"
#include "hdg_solver.hpp"
#include "interpolation.hpp"
#include "local_system.hpp"
#include "mesh.hpp"
#include "monolithic.hpp"
#include "postprocess.hpp"
#include "problem.hpp"
#include "projection.hpp"
#include "quadrature.hpp"
#include "raviart_thomas.hpp"
