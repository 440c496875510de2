#include "medmediate/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "medmediate/errors.hpp"

namespace medmediate {

namespace {

// ---------------------------------------------------------------- 1D: GK 7-15

constexpr double kGkNodes[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897,
    0.8648644233597690727897128, 0.7415311855993944398638648,
    0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
constexpr double kKronrodW[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007,
    0.1047900103222501838398763, 0.1406532597155259187451896,
    0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
// Gauss-7 weights, attached to Kronrod nodes 1, 3, 5 and the center.
constexpr double kGaussW[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678,
    0.3818300505051189449503698, 0.4179591836734693877551020};

struct Region1D {
    double a, b;
    double value;
    double error;
};

Region1D eval_gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - half * kGkNodes[i]);
        fv[14 - i] = f(center + half * kGkNodes[i]);
    }
    fv[7] = f(center);
    double resk = 0.0, resg = 0.0, resabs = 0.0;
    for (int i = 0; i < 7; ++i) {
        resk += kKronrodW[i] * (fv[i] + fv[14 - i]);
        resabs += kKronrodW[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    }
    resk += kKronrodW[7] * fv[7];
    resabs += kKronrodW[7] * std::abs(fv[7]);
    for (int i = 0; i < 3; ++i) resg += kGaussW[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    resg += kGaussW[3] * fv[7];

    const double reskh = 0.5 * resk;
    double resasc = kKronrodW[7] * std::abs(fv[7] - reskh);
    for (int i = 0; i < 7; ++i)
        resasc += kKronrodW[i] * (std::abs(fv[i] - reskh) + std::abs(fv[14 - i] - reskh));
    resasc *= half;
    resabs *= half;

    double err = std::abs(resk - resg) * half;
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double round_floor = 50.0 * std::numeric_limits<double>::epsilon() * resabs;
    err = std::max(err, round_floor);
    return Region1D{a, b, resk * half, err};
}

// ------------------------------------------------------- 2D: Genz-Malik 7(5)

// Generator radii and weights for d = 2, normalized so the weighted point
// counts sum to 1 (multiply estimates by the region area).
const double kLambda2 = std::sqrt(9.0 / 70.0);
const double kLambda3 = std::sqrt(9.0 / 10.0);
const double kLambda4 = std::sqrt(9.0 / 10.0);
const double kLambda5 = std::sqrt(9.0 / 19.0);
constexpr double kW1 = -3816.0 / 19683.0;   // center
constexpr double kW2 = 2940.0 / 19683.0;    // (+-l2, 0) axis points
constexpr double kW3 = 1020.0 / 19683.0;    // (+-l3, 0) axis points
constexpr double kW4 = 200.0 / 19683.0;     // (+-l4, +-l4)
constexpr double kW5 = 6859.0 / 19683.0 / 4.0;  // (+-l5, +-l5)
constexpr double kE1 = -971.0 / 729.0;      // degree-5 companion weights
constexpr double kE2 = 245.0 / 486.0;
constexpr double kE3 = 65.0 / 1458.0;
constexpr double kE4 = 25.0 / 729.0;

struct Region2D {
    std::array<double, 2> lo, hi;
    double value;
    double error;
    int split_axis;
};

Region2D eval_genz_malik(const std::function<double(double, double)>& f,
                         std::array<double, 2> lo, std::array<double, 2> hi) {
    const double cx = 0.5 * (lo[0] + hi[0]);
    const double cy = 0.5 * (lo[1] + hi[1]);
    const double hx = 0.5 * (hi[0] - lo[0]);
    const double hy = 0.5 * (hi[1] - lo[1]);
    const double volume = 4.0 * hx * hy;

    const double f0 = f(cx, cy);

    const double f2x0 = f(cx - kLambda2 * hx, cy);
    const double f2x1 = f(cx + kLambda2 * hx, cy);
    const double f2y0 = f(cx, cy - kLambda2 * hy);
    const double f2y1 = f(cx, cy + kLambda2 * hy);
    const double sum2 = f2x0 + f2x1 + f2y0 + f2y1;

    const double f3x0 = f(cx - kLambda3 * hx, cy);
    const double f3x1 = f(cx + kLambda3 * hx, cy);
    const double f3y0 = f(cx, cy - kLambda3 * hy);
    const double f3y1 = f(cx, cy + kLambda3 * hy);
    const double sum3 = f3x0 + f3x1 + f3y0 + f3y1;

    const double sum4 = f(cx - kLambda4 * hx, cy - kLambda4 * hy) +
                        f(cx - kLambda4 * hx, cy + kLambda4 * hy) +
                        f(cx + kLambda4 * hx, cy - kLambda4 * hy) +
                        f(cx + kLambda4 * hx, cy + kLambda4 * hy);

    const double sum5 = f(cx - kLambda5 * hx, cy - kLambda5 * hy) +
                        f(cx - kLambda5 * hx, cy + kLambda5 * hy) +
                        f(cx + kLambda5 * hx, cy - kLambda5 * hy) +
                        f(cx + kLambda5 * hx, cy + kLambda5 * hy);

    const double rule7 = kW1 * f0 + kW2 * sum2 + kW3 * sum3 + kW4 * sum4 + kW5 * sum5;
    const double rule5 = kE1 * f0 + kE2 * sum2 + kE3 * sum3 + kE4 * sum4;

    // Fourth-divided-difference heuristic for the split direction, built
    // from the already evaluated axis points.
    const double ratio = (kLambda2 * kLambda2) / (kLambda3 * kLambda3);
    const double dx = std::abs(f3x0 + f3x1 - 2.0 * f0 - ratio * (f2x0 + f2x1 - 2.0 * f0));
    const double dy = std::abs(f3y0 + f3y1 - 2.0 * f0 - ratio * (f2y0 + f2y1 - 2.0 * f0));

    Region2D r{lo, hi, volume * rule7, volume * std::abs(rule7 - rule5), dx >= dy ? 0 : 1};
    return r;
}

template <typename Region>
struct WorstFirst {
    bool operator()(const Region& a, const Region& b) const { return a.error < b.error; }
};

bool good_enough(double total_value, double total_error, const IntegrationOptions& opts) {
    const double target =
        std::max(opts.abs_tol, opts.rel_tol * std::abs(total_value));
    return total_error <= target;
}

[[noreturn]] void fail(double value, double error, const IntegrationOptions& opts) {
    (void)value;
    throw IntegrationError("integration did not reach the requested tolerance (rel_tol=" +
                               std::to_string(opts.rel_tol) + ") within " +
                               std::to_string(opts.max_regions) + " regions",
                           error);
}

}  // namespace

IntegrationResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                               const IntegrationOptions& opts) {
    if (!(a < b)) throw UsageError("integrate_1d: empty or inverted interval");
    std::priority_queue<Region1D, std::vector<Region1D>, WorstFirst<Region1D>> heap;
    Region1D whole = eval_gk15(f, a, b);
    double total_value = whole.value;
    double total_error = whole.error;
    std::size_t n_regions = 1;
    std::size_t n_evals = 15;
    heap.push(whole);
    while (!good_enough(total_value, total_error, opts)) {
        if (n_regions >= opts.max_regions) fail(total_value, total_error, opts);
        Region1D worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) fail(total_value, total_error, opts);
        Region1D left = eval_gk15(f, worst.a, mid);
        Region1D right = eval_gk15(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n_regions;
        n_evals += 30;
    }
    return IntegrationResult{total_value, total_error, n_evals};
}

IntegrationResult integrate_2d(const std::function<double(double, double)>& f,
                               std::array<double, 2> lo, std::array<double, 2> hi,
                               const IntegrationOptions& opts) {
    if (!(lo[0] < hi[0]) || !(lo[1] < hi[1]))
        throw UsageError("integrate_2d: empty or inverted rectangle");
    std::priority_queue<Region2D, std::vector<Region2D>, WorstFirst<Region2D>> heap;
    Region2D whole = eval_genz_malik(f, lo, hi);
    double total_value = whole.value;
    double total_error = whole.error;
    std::size_t n_regions = 1;
    std::size_t n_evals = 17;
    heap.push(whole);
    while (!good_enough(total_value, total_error, opts)) {
        if (n_regions >= opts.max_regions) fail(total_value, total_error, opts);
        Region2D worst = heap.top();
        heap.pop();
        const int ax = worst.split_axis;
        const double mid = 0.5 * (worst.lo[ax] + worst.hi[ax]);
        if (mid <= worst.lo[ax] || mid >= worst.hi[ax])
            fail(total_value, total_error, opts);
        std::array<double, 2> hi_left = worst.hi;
        hi_left[ax] = mid;
        std::array<double, 2> lo_right = worst.lo;
        lo_right[ax] = mid;
        Region2D left = eval_genz_malik(f, worst.lo, hi_left);
        Region2D right = eval_genz_malik(f, lo_right, worst.hi);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n_regions;
        n_evals += 34;
    }
    return IntegrationResult{total_value, total_error, n_evals};
}

}  // namespace medmediate
