#include <skew/pclvg.hpp>

#include <skew/detail/parallel.hpp>

#include <cmath>
#include <random>

namespace skew {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t path_idx) {
    return splitmix64(splitmix64(seed) ^ splitmix64(path_idx + 1));
}

} // namespace

McSample simulate_pclvg(const PclvgParams& p, double x0, double tau, int n_paths,
                        std::uint64_t seed, const McConfig& cfg) {
    p.validate();
    if (!(x0 > 0.0)) throw Error("simulate_pclvg: x0 must be positive");
    if (!(tau > 0.0)) throw Error("simulate_pclvg: tau must be positive");
    if (n_paths < 1) throw Error("simulate_pclvg: n_paths must be >= 1");

    const double U = p.barrier;
    const int n_steps = cfg.n_steps;

    McSample out;
    out.terminal.resize(static_cast<std::size_t>(n_paths));
    out.running_max.resize(static_cast<std::size_t>(n_paths));

    detail::parallel_for(static_cast<std::size_t>(n_paths), 0, [&](std::size_t path) {
        std::mt19937_64 rng(substream_seed(seed, path));
        std::exponential_distribution<double> exp1(1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);

        const double xi = exp1(rng);
        const double ds = tau * tau * xi / n_steps;
        const double step1 = std::sqrt(2.0 * ds) * p.sigma1;
        const double step2 = std::sqrt(2.0 * ds) * p.sigma2;
        const double var1 = p.sigma1 * p.sigma1 * ds; // bridge variance scale below U
        const double var2 = p.sigma2 * p.sigma2 * ds;

        double d = x0;
        double dmax = x0;
        for (int k = 0; k < n_steps; ++k) {
            const bool below = d < U;
            const double dn = d + (below ? step1 : step2) * gauss(rng);
            if (dn <= 0.0) {
                d = 0.0; // absorbed
                break;
            }
            if (cfg.bridge_crossing) {
                const double var = below ? var1 : var2;
                // barrier touch between grid points (both endpoints below U)
                if (below && dn < U) {
                    const double prod = (U - d) * (U - dn);
                    if (prod < 30.0 * var && unif(rng) < std::exp(-prod / var))
                        dmax = std::max(dmax, U);
                }
                // absorption at zero between grid points
                if (d * dn < 30.0 * var && unif(rng) < std::exp(-d * dn / var)) {
                    d = 0.0;
                    break;
                }
            }
            d = dn;
            if (dn > dmax) dmax = dn;
        }
        out.terminal[path] = d;
        out.running_max[path] = dmax;
    });
    return out;
}

} // namespace skew
