#include "loopsim/network.hpp"

#include <cmath>
#include <stdexcept>

namespace loopsim {

void ReflectivitySchedule::validate() const {
    if (m < 1) throw std::invalid_argument("schedule: m must be a positive integer");
    if (static_cast<int>(reflectivities.size()) != m - 1) {
        throw std::invalid_argument("schedule: reflectivities must have length m-1");
    }
    for (double r : reflectivities) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw std::invalid_argument("schedule: reflectivities must lie in [0,1]");
        }
    }
    if (!(bin_period_ns > 0.0)) throw std::invalid_argument("schedule: bin_period_ns must be > 0");
    if (!(loop_transmission > 0.0 && loop_transmission <= 1.0)) {
        throw std::invalid_argument("schedule: loop_transmission must lie in (0,1]");
    }
}

Eigen::Matrix2d beamsplitter_block(double reflectivity) {
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
        throw std::invalid_argument("beamsplitter_block: reflectivity must lie in [0,1]");
    }
    const double c = std::sqrt(reflectivity);
    const double s = std::sqrt(1.0 - reflectivity);
    Eigen::Matrix2d block;
    block << c, s, s, -c;
    return block;
}

ModeMatrix compile_network(const ReflectivitySchedule& schedule) {
    schedule.validate();
    const int m = schedule.m;
    const double root_eta = std::sqrt(schedule.loop_transmission);

    ModeMatrix matrix = ModeMatrix::Zero(m, m);
    // loop(i): amplitude of input bin i currently stored in the delay loop
    Eigen::VectorXcd loop = Eigen::VectorXcd::Zero(m);
    loop(0) = 1.0;  // R(0) = 1 routes bin 1 into the loop

    for (int k = 1; k <= m - 1; ++k) {
        loop *= root_eta;  // delay traversal before event k
        const double cross = std::sqrt(schedule.reflectivities[k - 1]);
        const double straight = std::sqrt(1.0 - schedule.reflectivities[k - 1]);
        // exit arm of event k is output bin k; fresh input bin k+1 arrives now
        matrix.row(k - 1) = (cross * loop).transpose();
        matrix(k - 1, k) += straight;
        loop *= straight;
        loop(k) -= cross;
    }

    loop *= root_eta;       // final traversal
    matrix.row(m - 1) = loop.transpose();  // R(m*tau) = 1 flushes the loop
    return matrix;
}

std::vector<double> preview_intensity(const ReflectivitySchedule& schedule) {
    schedule.validate();
    std::vector<double> transmitted;
    transmitted.reserve(schedule.reflectivities.size());
    for (double r : schedule.reflectivities) transmitted.push_back(1.0 - r);
    return transmitted;
}

std::vector<double> staircase_reflectivities(int modes) {
    if (modes < 1) throw std::invalid_argument("staircase_reflectivities: modes must be positive");
    std::vector<double> r;
    r.reserve(modes - 1);
    for (int k = 1; k <= modes - 1; ++k) {
        r.push_back(static_cast<double>(k) / static_cast<double>(k + 1));
    }
    return r;
}

}  // namespace loopsim
