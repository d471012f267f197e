#include "mtl/distributions.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mtl {

namespace {

void require_open_unit(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream msg;
        msg << "quantile: probability " << q << " is outside (0, 1)";
        throw std::domain_error(msg.str());
    }
}

}  // namespace

UniformWtp::UniformWtp(double lower, double upper) : lower_(lower), upper_(upper) {
    if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
        throw std::invalid_argument("uniform distribution requires finite min < max");
    }
}

double UniformWtp::cdf(double x) const {
    if (x <= lower_) return 0.0;
    if (x >= upper_) return 1.0;
    return (x - lower_) / (upper_ - lower_);
}

// The density at the lower bound takes the interior value; at the upper bound it is zero.
double UniformWtp::pdf(double x) const {
    if (x < lower_ || x >= upper_) return 0.0;
    return 1.0 / (upper_ - lower_);
}

double UniformWtp::quantile(double q) const {
    require_open_unit(q);
    return lower_ + q * (upper_ - lower_);
}

std::string UniformWtp::describe() const {
    std::ostringstream out;
    out << "uniform[" << lower_ << ", " << upper_ << "]";
    return out.str();
}

LogitWtp::LogitWtp(double center, double beta) : center_(center), beta_(beta) {
    if (!std::isfinite(center) || !std::isfinite(beta) || !(beta > 0.0)) {
        throw std::invalid_argument("logit distribution requires finite center and beta > 0");
    }
}

LogitWtp LogitWtp::from_width(double center, double width) {
    if (!std::isfinite(width) || !(width > 0.0)) {
        throw std::invalid_argument("logit distribution requires width > 0");
    }
    return LogitWtp(center, 4.0 / width);
}

double LogitWtp::cdf(double x) const {
    const double z = beta_ * (x - center_);
    // Branch on sign so exp never overflows.
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double LogitWtp::pdf(double x) const {
    const double f = cdf(x);
    return beta_ * f * (1.0 - f);
}

double LogitWtp::quantile(double q) const {
    require_open_unit(q);
    return center_ + std::log(q / (1.0 - q)) / beta_;
}

double LogitWtp::support_min() const { return -std::numeric_limits<double>::infinity(); }
double LogitWtp::support_max() const { return std::numeric_limits<double>::infinity(); }

std::string LogitWtp::describe() const {
    std::ostringstream out;
    out << "logit(center=" << center_ << ", beta=" << beta_ << ")";
    return out.str();
}

}  // namespace mtl
