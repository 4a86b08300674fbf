#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace minsurf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Conditioning, infeasibility and factorization failures.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Degenerate geometric configurations (collinear stencils, vanishing gradients, ...).
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input files; carries the offending 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

/// Deterministic standard normal draws: Box-Muller on top of mt19937_64 so the
/// stream does not depend on the C++ library's distribution implementation.
class NormalSampler {
  public:
    explicit NormalSampler(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        spare_ = mag * std::sin(ang);
        have_spare_ = true;
        return mag * std::cos(ang);
    }

    double uniform01() {
        // 53-bit mantissa from the top bits of the 64-bit word
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Static-partition parallel loop over [0, n). Each index is processed exactly
/// once by exactly one thread, so results are identical for any thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                         unsigned num_threads = 0) {
    if (num_threads == 0) num_threads = std::max(1u, std::thread::hardware_concurrency());
    if (num_threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(num_threads);
    std::atomic<std::size_t> next{0};
    const std::size_t chunk = std::max<std::size_t>(1, n / (8 * num_threads));
    for (unsigned t = 0; t < num_threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= n) return;
                const std::size_t end = std::min(n, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace minsurf
