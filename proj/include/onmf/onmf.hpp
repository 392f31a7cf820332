#pragma once

// Umbrella header for the orthogonal NMF clustering toolkit.

#include "onmf/assignment.hpp"
#include "onmf/bench.hpp"
#include "onmf/dense_matrix.hpp"
#include "onmf/init.hpp"
#include "onmf/io.hpp"
#include "onmf/labels.hpp"
#include "onmf/metrics.hpp"
#include "onmf/orthogonal_h.hpp"
#include "onmf/run_report.hpp"
#include "onmf/solver.hpp"
#include "onmf/sparse_matrix.hpp"
#include "onmf/synth.hpp"
