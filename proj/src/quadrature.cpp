#include "dce/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dce {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

void GridSpec::validate() const {
    const std::size_t n = points_per_period;
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("GridSpec: points_per_period must be a power of two");
    for (std::size_t i = 0; i < eps_sequence.size(); ++i) {
        if (!(eps_sequence[i] > 0.0)) throw std::invalid_argument("GridSpec: separations must be positive");
        if (i > 0 && !(eps_sequence[i] < eps_sequence[i - 1]))
            throw std::invalid_argument("GridSpec: separations must be strictly decreasing");
    }
}

std::vector<double> GridSpec::separations(double omega) const {
    std::vector<double> eps;
    if (eps_sequence.empty()) {
        for (int k = 0; k <= 6; ++k) eps.push_back(std::ldexp(1e-2, -k) / omega);
    } else {
        for (double e : eps_sequence) eps.push_back(e / omega);
    }
    return eps;
}

double integrate_period(const std::function<double(double)>& f, double omega, const GridSpec& grid, double u0) {
    grid.validate();
    const std::size_t n = grid.points_per_period;
    const double h = 2.0 * kPi / omega / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += f(u0 + h * static_cast<double>(k));
    return sum * h;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
    if (panels == 0) throw std::invalid_argument("gauss_legendre: panels must be positive");
    const double w = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        const double lo = a + w * static_cast<double>(i);
        sum += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, i + 1 == panels ? b : lo + w);
    }
    return sum;
}

SplitResult point_split_density(const RayMapView& V, double u, double omega, const GridSpec& grid) {
    grid.validate();
    if (!V.value || !V.derivative) throw std::invalid_argument("point_split_density: value and derivative required");
    const std::vector<double> eps = grid.separations(omega);
    const std::size_t n = eps.size();
    const double v0 = std::abs(V.value(u));
    constexpr double kEps = std::numeric_limits<double>::epsilon();

    std::vector<double> x(n);
    std::vector<double> table(n);
    std::vector<double> noise(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double a = u - 0.5 * eps[k];
        const double b = u + 0.5 * eps[k];
        const double da = V.derivative(a);
        const double db = V.derivative(b);
        const double dv = V.increment ? V.increment(a, b) : V.value(b) - V.value(a);
        if (!(da > 0.0 && db > 0.0 && dv > 0.0))
            throw std::domain_error("point_split_density: ray map not increasing near u");
        // realized separation; b − a is exact (Sterbenz) while eps[k] is not
        const double h = b - a;
        const double inv = 1.0 / (h * h);
        table[k] = -(da * db / (dv * dv) - inv) / (4.0 * kPi);
        x[k] = h * h;
        const double diff_rel = V.increment ? kEps : kEps * (1.0 + 2.0 * v0 / dv);
        noise[k] = inv * (8.0 * kEps + 2.0 * diff_rel) / (4.0 * kPi);
    }

    // Lagrange weights at x = 0 bound the propagated rounding
    double floor = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double w = 1.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != k) w *= x[j] / (x[j] - x[k]);
        floor += std::abs(w) * noise[k];
    }

    // Neville tableau in x = ε², extrapolated to 0
    std::vector<double> p = table;
    double prev = p[n - 1];
    for (std::size_t m = 1; m < n; ++m) {
        prev = p[n - 1];
        for (std::size_t i = n - 1; i >= m; --i) {
            p[i] = (x[i - m] * p[i] - x[i] * p[i - 1]) / (x[i - m] - x[i]);
            if (i == m) break;
        }
    }
    SplitResult r;
    r.value = p[n - 1];
    r.error = std::abs(p[n - 1] - prev) + floor;
    return r;
}

SpectrumIntegral integrate_spectrum(const std::function<double(double)>& n, double nu_max, const SpectrumQuadrature& q) {
    if (q.panels_per_arch == 0) throw std::invalid_argument("integrate_spectrum: panels_per_arch must be positive");
    using rule = boost::math::quadrature::gauss<double, 20>;
    const auto& nodes = rule::abscissa();
    const auto& weights = rule::weights();
    SpectrumIntegral out;
    const bool automatic = !(nu_max > 0.0);
    const std::size_t arches = automatic ? q.max_arches : static_cast<std::size_t>(std::ceil(nu_max));
    double last = 0.0;
    for (std::size_t k = 0; k < arches; ++k) {
        const double lo = static_cast<double>(k);
        const double hi = automatic ? lo + 1.0 : std::min(lo + 1.0, nu_max);
        const double w = (hi - lo) / static_cast<double>(q.panels_per_arch);
        double photons = 0.0;
        double energy = 0.0;
        for (std::size_t i = 0; i < q.panels_per_arch; ++i) {
            const double c = lo + w * (static_cast<double>(i) + 0.5);
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                for (double s : {-1.0, 1.0}) {
                    const double nu = c + s * 0.5 * w * nodes[j];
                    const double val = n(nu) * 0.5 * w * weights[j];
                    photons += val;
                    energy += nu * val;
                }
            }
        }
        out.photon_number += photons;
        out.energy_moment += energy;
        out.nu_max = hi;
        last = energy;
        if (automatic && std::abs(energy) <= q.tail_tol * std::abs(out.energy_moment)) return out;
    }
    out.truncation_warning = out.energy_moment != 0.0 && std::abs(last) >= q.tail_tol * std::abs(out.energy_moment);
    return out;
}

}  // namespace dce
