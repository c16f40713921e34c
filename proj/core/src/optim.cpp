#include "mrfut/optim.hpp"

#include <algorithm>
#include <cmath>

namespace mrfut {

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double step, double tol, int max_iter) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    SimplexResult res;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });

        // simplex diameter relative to the best vertex scale
        double diam = 0.0, scale = 1.0;
        for (std::size_t k = 0; k < n; ++k)
            scale = std::max(scale, std::fabs(pts[order[0]][k]));
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                diam = std::max(diam, std::fabs(pts[order[i]][k] - pts[order[0]][k]));
        if (diam < tol * scale) {
            res.converged = true;
            break;
        }

        const std::size_t worst = order[n];
        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[order[i]][k] / n;

        auto combine = [&](double coef) {
            std::vector<double> x(n);
            for (std::size_t k = 0; k < n; ++k)
                x[k] = centroid[k] + coef * (pts[worst][k] - centroid[k]);
            return x;
        };

        std::vector<double> xr = combine(-1.0);
        double fr = f(xr);
        if (fr < fv[order[0]]) {
            std::vector<double> xe = combine(-2.0);
            double fe = f(xe);
            if (fe < fr) { pts[worst] = std::move(xe); fv[worst] = fe; }
            else { pts[worst] = std::move(xr); fv[worst] = fr; }
        } else if (fr < fv[order[n - 1]]) {
            pts[worst] = std::move(xr); fv[worst] = fr;
        } else {
            std::vector<double> xc = combine(fr < fv[worst] ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = std::move(xc); fv[worst] = fc;
            } else {
                // shrink toward best
                for (std::size_t i = 1; i <= n; ++i) {
                    std::size_t j = order[i];
                    for (std::size_t k = 0; k < n; ++k)
                        pts[j][k] = pts[order[0]][k] + 0.5 * (pts[j][k] - pts[order[0]][k]);
                    fv[j] = f(pts[j]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    res.x = pts[best];
    res.fx = fv[best];
    res.iterations = iter;
    return res;
}

}  // namespace mrfut
