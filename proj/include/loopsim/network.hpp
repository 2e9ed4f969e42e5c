#pragma once

#include <Eigen/Dense>
#include <vector>

namespace loopsim {

// Transfer matrix of the compiled network: entry (j, i) is the amplitude
// from input bin i to output bin j (0-indexed).
using ModeMatrix = Eigen::MatrixXcd;

// Reflectivity program of the loop interferometer. The stored values are
// the m-1 interior reflectivities R_k (k = 1..m-1); the boundary settings
// R(0) = R(m*tau) = 1 that load and flush the loop are implicit.
struct ReflectivitySchedule {
    int m = 0;                            // number of time-bin modes
    std::vector<double> reflectivities;   // R_k for k = 1..m-1
    double bin_period_ns = 100.0;         // tau
    double loop_transmission = 1.0;       // power transmission per delay traversal

    void validate() const;  // throws std::invalid_argument on bad fields
};

// 2x2 beamsplitter in the fixed phase convention used throughout:
//   [  sqrt(R)    sqrt(1-R) ]
//   [ sqrt(1-R)   -sqrt(R)  ]
// Real orthogonal for every R in [0, 1]. Applied to (loop, fresh) it yields
// (exit, loop): sqrt(R) couples loop<->exit and fresh<->loop, sqrt(1-R) is
// the straight-through term, so R = 1 flushes the loop and captures the
// fresh bin, R = 0 passes the fresh bin straight to the exit.
Eigen::Matrix2d beamsplitter_block(double reflectivity);

// Compile the schedule into the equivalent m-mode transfer matrix by
// propagating the loop amplitude through the beamsplitter events. Each
// delay traversal multiplies the loop amplitude by sqrt(loop_transmission);
// a path from input bin i to output bin j traverses the delay j-i+1 times.
// Unitary when loop_transmission = 1, sub-unitary otherwise, and banded:
// entry (j, i) = 0 whenever j < i-1.
ModeMatrix compile_network(const ReflectivitySchedule& schedule);

// Classical transmitted fraction 1-R_k per beamsplitter event: the
// calibration trace observed at the output when the loop is blocked.
std::vector<double> preview_intensity(const ReflectivitySchedule& schedule);

// R_k = k/(k+1), k = 1..m-1.
std::vector<double> staircase_reflectivities(int modes);

}  // namespace loopsim
