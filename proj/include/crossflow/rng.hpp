#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "crossflow/errors.hpp"

namespace crossflow
{
    // splitmix64 step; used to spread one user seed into independent
    // per-purpose stream seeds.
    constexpr std::uint64_t splitmix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
    {
        return splitmix64(base + stream * 0x9e3779b97f4a7c15ULL);
    }

    // Deterministic draws built on the engine's raw 64-bit output only;
    // library distributions are not portable across standard libraries.
    class Rng
    {
    public:
        explicit Rng(std::uint64_t seed) : engine_(seed) {}

        double uniform01()
        {
            return double(engine_() >> 11) * 0x1.0p-53; // [0,1) on the 53-bit grid
        }

        // Knuth multiplication method; fine for the small rates used here.
        int poisson(double lambda)
        {
            if (lambda < 0.0)
                throw DomainError("poisson rate must be non-negative");
            if (lambda == 0.0)
                return 0;
            const double floor = std::exp(-lambda);
            int k = 0;
            double p = 1.0;
            do
            {
                ++k;
                p *= uniform01();
            } while (p > floor);
            return k - 1;
        }

        // Index drawn proportionally to the weights.
        int weighted_choice(const std::vector<double>& weights)
        {
            double total = 0.0;
            for (double w : weights)
            {
                if (w < 0.0)
                    throw DomainError("choice weight must be non-negative");
                total += w;
            }
            if (total <= 0.0)
                throw DomainError("choice weights sum to zero");
            const double target = uniform01() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < weights.size(); ++i)
            {
                cum += weights[i];
                if (target < cum)
                    return static_cast<int>(i);
            }
            return static_cast<int>(weights.size()) - 1; // rounding guard
        }

    private:
        std::mt19937_64 engine_;
    };

} // namespace crossflow
