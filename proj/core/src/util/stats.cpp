#include "deforsc/util/stats.hpp"

#include <cmath>

namespace deforsc {

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double compensated_sum(const std::vector<double>& v) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        double y = x - comp;
        double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double two_sided_p(double estimate, double se) {
    if (se <= 0.0) return estimate == 0.0 ? 1.0 : 0.0;
    const double z = std::fabs(estimate / se);
    return 2.0 * (1.0 - normal_cdf(z));
}

}  // namespace deforsc
