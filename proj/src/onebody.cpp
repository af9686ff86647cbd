#include "fibcone/onebody.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fibcone/errors.hpp"
#include "fibcone/fitting.hpp"

namespace fibcone {

TridiagonalOperator build_hamiltonian(const PotentialSpec& spec, std::size_t n) {
    return TridiagonalOperator{generate(spec, n).values};
}

SpectralData eigensolve(const TridiagonalOperator& T, bool want_vectors) {
    const std::size_t n = T.size();
    if (n < 1) throw domain_error("eigensolve: empty operator");

    std::vector<double> d = T.diagonal;
    std::vector<double> e(n, 1.0); // e[i] couples sites i, i+1; e[n-1] is a sentinel
    e[n - 1] = 0.0;

    SpectralData s;
    s.n = n;
    if (want_vectors) {
        s.vectors.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) s.vectors[i * n + i] = 1.0;
    }
    double* z = s.vectors.data();

    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        for (;;) {
            std::size_t m = l;
            while (m + 1 < n) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
                ++m;
            }
            if (m == l) break;
            if (++iter > 50)
                throw numeric_failure("eigensolve: no convergence at index " + std::to_string(l));
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double sn = 1.0, cs = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                double f = sn * e[i];
                const double b = cs * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) { // negligible rotation; deflate and retry
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                sn = f / r;
                cs = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * sn + 2.0 * cs * b;
                p = sn * r;
                d[i + 1] = g + p;
                g = cs * r - b;
                if (want_vectors) {
                    double* zi = z + i * n;
                    double* zi1 = zi + n;
                    for (std::size_t k = 0; k < n; ++k) {
                        f = zi1[k];
                        zi1[k] = sn * zi[k] + cs * f;
                        zi[k] = cs * zi[k] - sn * f;
                    }
                }
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // ascending order, permuting eigenvector columns along
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    s.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.eigenvalues[i] = d[order[i]];
    if (want_vectors) {
        std::vector<double> sorted(n * n);
        for (std::size_t i = 0; i < n; ++i)
            std::copy(z + order[i] * n, z + (order[i] + 1) * n, sorted.begin() + i * n);
        s.vectors = std::move(sorted);
    }
    return s;
}

double PropagatorRow::outside_probability(std::size_t N) const {
    double sum = 0.0;
    for (std::size_t k = amplitudes.size(); k-- > N;) sum += std::norm(amplitudes[k]);
    return sum;
}

PropagatorRow Propagator::row(std::size_t j, double t) const {
    const std::size_t n = s_.n;
    if (j < 1 || j > n) throw domain_error("propagator row: source site out of range");
    if (!std::isfinite(t)) throw domain_error("propagator row: t must be finite");
    PropagatorRow out;
    out.t = t;
    out.j = j;
    out.amplitudes.assign(n, {0.0, 0.0});
    std::vector<std::complex<double>> w(n);
    for (std::size_t m = 0; m < n; ++m)
        w[m] = s_.vec(j - 1, m) * std::polar(1.0, -2.0 * s_.eigenvalues[m] * t);
    auto* amp = out.amplitudes.data();
    for (std::size_t m = 0; m < n; ++m) {
        const double* col = s_.vectors.data() + m * n;
        const std::complex<double> wm = w[m];
        for (std::size_t k = 0; k < n; ++k) amp[k] += col[k] * wm;
    }
    return out;
}

std::vector<std::complex<double>> resolvent_column(const TridiagonalOperator& T,
                                                   const ResolventQuery& q) {
    const std::size_t n = T.size();
    if (q.m < 1 || q.m > n) throw domain_error("resolvent: column site out of range");
    if (q.z.imag() == 0.0) throw domain_error("resolvent: z must be strictly off the real axis");

    using cd = std::complex<double>;
    // rows of (-2T - z): lower = -2, diag = -2V_i - z, upper = -2
    std::vector<cd> dl(n, -2.0), dg(n), du(n, -2.0), du2(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) dg[i] = -2.0 * T.diagonal[i] - q.z;
    dl[0] = 0.0;
    if (n > 0) du[n - 1] = 0.0;

    std::vector<cd> x(n, cd(0.0, 0.0));
    x[q.m - 1] = 1.0;

    // LU with partial pivoting between adjacent rows (one fill-in diagonal)
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(dg[i]) >= std::abs(dl[i + 1])) {
            const cd mult = dl[i + 1] / dg[i];
            dg[i + 1] -= mult * du[i];
            x[i + 1] -= mult * x[i];
            if (i + 2 < n) du2[i] = 0.0;
        } else { // swap rows i, i+1
            const cd mult = dg[i] / dl[i + 1];
            dg[i] = dl[i + 1];
            cd tmp = dg[i + 1];
            dg[i + 1] = du[i] - mult * tmp;
            du2[i] = (i + 2 < n) ? du[i + 1] : cd(0.0);
            du[i] = tmp;
            if (i + 2 < n) du[i + 1] = -mult * du2[i];
            std::swap(x[i], x[i + 1]);
            x[i + 1] -= mult * x[i];
        }
    }
    // back substitution
    for (std::size_t i = n; i-- > 0;) {
        cd v = x[i];
        if (i + 1 < n) v -= du[i] * x[i + 1];
        if (i + 2 < n) v -= du2[i] * x[i + 2];
        x[i] = v / dg[i];
    }
    return x;
}

std::vector<CombesThomasRow> combes_thomas_report(
    const TridiagonalOperator& T, double E, std::span<const double> eps_list,
    std::span<const std::pair<std::size_t, std::size_t>> pair_samples) {
    if (pair_samples.size() < 3) throw domain_error("combes_thomas_report: need >= 3 sample pairs");
    for (double e : eps_list)
        if (!(e > 0)) throw domain_error("combes_thomas_report: eps must be > 0");

    const SpectralData s = eigensolve(T, false);
    std::vector<CombesThomasRow> table;
    table.reserve(eps_list.size());
    for (double eps : eps_list) {
        const std::complex<double> z(E, eps);
        double dmin = std::numeric_limits<double>::infinity();
        for (double ev : s.eigenvalues) dmin = std::min(dmin, std::abs(z - (-2.0 * ev)));
        const double d = std::min(dmin, 1.0);

        // group pair samples by column to reuse solves
        std::vector<double> xs, ys;
        std::vector<std::pair<std::size_t, std::size_t>> pairs(pair_samples.begin(), pair_samples.end());
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return a.second < b.second; });
        std::size_t i = 0;
        while (i < pairs.size()) {
            const std::size_t m = pairs[i].second;
            const auto col = resolvent_column(T, {z, m});
            for (; i < pairs.size() && pairs[i].second == m; ++i) {
                const std::size_t l = pairs[i].first;
                const double a = std::abs(col[l - 1]);
                if (a > 0 && l != m) {
                    xs.push_back(static_cast<double>(l > m ? l - m : m - l));
                    ys.push_back(std::log(a));
                }
            }
        }
        const LineFit f = fit_line(xs, ys);
        table.push_back({eps, d, -f.slope, -f.slope / d});
    }
    return table;
}

namespace {
// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGlNodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                0.9445750230732326, 0.9894009349916499};
constexpr double kGlWeights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                  0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                  0.0622535239386479, 0.0271524594117541};
} // namespace

DunfordResult dunford_check(const TridiagonalOperator& T, std::size_t j, std::size_t k, double t,
                            const RectangularContour& contour, std::size_t quad_points) {
    if (t < 0) throw domain_error("dunford_check: t must be >= 0");
    const SpectralData s = eigensolve(T);
    const double lo = -2.0 * s.eigenvalues.back();
    const double hi = -2.0 * s.eigenvalues.front();
    if (!(contour.half_width > std::max(std::abs(lo), std::abs(hi)) && contour.half_height > 0))
        throw domain_error("dunford_check: contour does not enclose the spectrum of -2T");

    using cd = std::complex<double>;
    const cd corners[4] = {cd(-contour.half_width, -contour.half_height),
                           cd(contour.half_width, -contour.half_height),
                           cd(contour.half_width, contour.half_height),
                           cd(-contour.half_width, contour.half_height)};
    const double perimeter = 4.0 * contour.half_width + 4.0 * contour.half_height;
    cd integral(0.0, 0.0);
    for (int side = 0; side < 4; ++side) {
        const cd a = corners[side], b = corners[(side + 1) % 4];
        const double len = std::abs(b - a);
        const std::size_t panels =
            std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(
                                         static_cast<double>(quad_points) * len / perimeter / 16.0)));
        for (std::size_t p = 0; p < panels; ++p) {
            const cd pa = a + (b - a) * (static_cast<double>(p) / panels);
            const cd pb = a + (b - a) * (static_cast<double>(p + 1) / panels);
            const cd mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            for (int g = 0; g < 8; ++g) {
                for (double sign : {-1.0, 1.0}) {
                    const cd z = mid + sign * kGlNodes[g] * half;
                    const auto col = resolvent_column(T, {z, k});
                    integral += kGlWeights[g] * half * std::exp(cd(0.0, t) * z) * col[j - 1];
                }
            }
        }
    }
    DunfordResult r;
    r.contour_value = -integral / cd(0.0, 2.0 * M_PI);
    cd spectral(0.0, 0.0);
    for (std::size_t m = 0; m < s.n; ++m)
        spectral += s.vec(j - 1, m) * s.vec(k - 1, m) * std::polar(1.0, -2.0 * s.eigenvalues[m] * t);
    r.spectral_value = spectral;
    r.difference = std::abs(r.contour_value - r.spectral_value);
    return r;
}

double spectral_bound(double lambda) {
    if (lambda < 0) throw domain_error("spectral_bound: lambda must be >= 0");
    return std::max(4.0, 2.0 * lambda + 5.0);
}

} // namespace fibcone
