#pragma once

#include <memory>
#include <string>

namespace mtl {

/// Cumulative distribution of consumer reservation prices (willingness to pay).
///
/// Implementations are immutable once constructed, so a single instance may be
/// shared by any number of concurrent simulations.
class WtpDistribution {
public:
    virtual ~WtpDistribution() = default;

    /// Fraction of consumers whose reservation price is below `x`. Total on the reals.
    virtual double cdf(double x) const = 0;
    virtual double pdf(double x) const = 0;
    /// Inverse of cdf on the interior of the support. Throws std::domain_error unless 0 < q < 1.
    virtual double quantile(double q) const = 0;
    /// Inverse of the largest slope of the cdf.
    virtual double width() const = 0;
    virtual double support_min() const = 0;
    virtual double support_max() const = 0;
    virtual std::string describe() const = 0;
};

using WtpPtr = std::shared_ptr<const WtpDistribution>;

/// Uniform reservation prices on [lower, upper]; the cdf is clipped to [0,1] outside.
class UniformWtp final : public WtpDistribution {
public:
    UniformWtp(double lower, double upper);

    double cdf(double x) const override;
    double pdf(double x) const override;
    double quantile(double q) const override;
    double width() const override { return upper_ - lower_; }
    double support_min() const override { return lower_; }
    double support_max() const override { return upper_; }
    std::string describe() const override;

    double lower() const { return lower_; }
    double upper() const { return upper_; }

private:
    double lower_;
    double upper_;
};

/// Logistic cdf 1 / (1 + exp(-beta (x - center))). Width is 4 / beta.
class LogitWtp final : public WtpDistribution {
public:
    LogitWtp(double center, double beta);
    static LogitWtp from_width(double center, double width);

    double cdf(double x) const override;
    double pdf(double x) const override;
    double quantile(double q) const override;
    double width() const override { return 4.0 / beta_; }
    double support_min() const override;
    double support_max() const override;
    std::string describe() const override;

    double center() const { return center_; }
    double beta() const { return beta_; }

private:
    double center_;
    double beta_;
};

}  // namespace mtl
