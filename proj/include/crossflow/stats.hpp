#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "crossflow/errors.hpp"

namespace crossflow
{
    inline double median(std::vector<double> values)
    {
        if (values.empty())
            throw DomainError("median of an empty sample");
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        if (n % 2 == 1)
            return values[n / 2];
        return 0.5 * (values[n / 2 - 1] + values[n / 2]);
    }

    // Ranks with ties sharing their average rank.
    inline std::vector<double> average_ranks(const std::vector<double>& values)
    {
        const std::size_t n = values.size();
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<double> ranks(n, 0.0);
        std::size_t i = 0;
        while (i < n)
        {
            std::size_t j = i;
            while (j + 1 < n && values[order[j + 1]] == values[order[i]])
                ++j;
            const double shared = 0.5 * (double(i) + double(j)) + 1.0; // 1-based
            for (std::size_t k = i; k <= j; ++k)
                ranks[order[k]] = shared;
            i = j + 1;
        }
        return ranks;
    }

    // Spearman rank correlation: Pearson correlation of the rank vectors.
    inline double spearman(const std::vector<double>& x, const std::vector<double>& y)
    {
        if (x.size() != y.size())
            throw DomainError("spearman needs equal-length samples");
        if (x.size() < 2)
            throw DomainError("spearman needs at least two points");
        const std::vector<double> rx = average_ranks(x);
        const std::vector<double> ry = average_ranks(y);
        const std::size_t n = rx.size();
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            mx += rx[i];
            my += ry[i];
        }
        mx /= double(n);
        my /= double(n);
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            sxy += (rx[i] - mx) * (ry[i] - my);
            sxx += (rx[i] - mx) * (rx[i] - mx);
            syy += (ry[i] - my) * (ry[i] - my);
        }
        if (sxx == 0.0 || syy == 0.0)
            return 0.0; // a constant series carries no ordering signal
        return sxy / std::sqrt(sxx * syy);
    }

} // namespace crossflow
