#pragma once

#include <knncp/detector.hpp>
#include <knncp/matrix_io.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace knncp::simlab {

enum class Family { gaussian, chi_square, student_t, lognormal, weibull, gamma, beta };

Family parse_family(std::string_view name);
std::string_view to_string(Family family);

/// Per-coordinate base draws u_j from `family`, optionally centered, mixed
/// across coordinates by the AR(1) recursion x_1 = u_1,
/// x_j = rho x_{j-1} + sqrt(1 - rho^2) u_j (covariance rho^|i-j| for unit
/// variance u), then on the first `subset` coordinates (all when 0) scaled by
/// sqrt(variance_scale) and shifted by mean_shift.
struct DistributionSpec {
    Family family = Family::gaussian;
    /// gaussian: mean, sd. chi_square: df. student_t: df. lognormal: log-mean,
    /// log-sd. weibull: shape, scale. gamma: shape, scale. beta: alpha, beta.
    double param1 = 0.0;
    double param2 = 1.0;
    bool centered = false;
    double rho = 0.0;
    double variance_scale = 1.0;
    double mean_shift = 0.0;
    std::size_t subset = 0;

    friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

/// Checks the family parameters; throws InvalidArgument.
void validate(const DistributionSpec& spec);

/// Mean and variance of a single base draw (before mixing and shifts).
double family_mean(const DistributionSpec& spec);
double family_variance(const DistributionSpec& spec);

struct Scenario {
    std::string name;
    std::size_t n = 1000;
    std::size_t d = 25;
    /// Rows 1..tau follow f0 and rows tau+1..n follow f1.
    std::size_t tau = 250;
    DistributionSpec f0;
    DistributionSpec f1;
    std::uint64_t seed = 1;

    bool is_null() const { return f0 == f1; }
};

/// Rows from f0 then f1; a pure function of (scenario, replicate).
DataMatrix generate(const Scenario& scenario, std::size_t replicate);

/// n x d draws from one distribution.
DataMatrix sample(const DistributionSpec& spec, std::size_t n, std::size_t d, std::uint64_t seed,
                  std::uint64_t stream = 0);

/// Dimensions of the published power and type II grids.
inline constexpr std::size_t kGridDimensions[5] = {25, 100, 500, 1000, 2000};

/// Power scenarios "S1".."S6" at one of the grid dimensions.
Scenario power_scenario(std::string_view name, std::size_t d);

/// Scenario "S2" reading b as a Weibull scale instead of a diagonal inflation:
/// the 5 changed coordinates switch from Weibull(1, 1) to Weibull(1, b).
Scenario power_scenario_s2_weibull(std::size_t d);

/// Type II settings "T1".."T6" (per-coordinate families) at a grid dimension.
Scenario type2_scenario(std::string_view name, std::size_t d);

/// Homogeneous multivariate standard Gaussian of length n.
Scenario null_scenario(std::size_t n, std::size_t d);

enum class ChangeType { mean, variance, covariance, skewness, kurtosis };

ChangeType parse_change_type(std::string_view name);
std::string_view to_string(ChangeType type);

/// Change of the given type; `size` is ||Delta||_2 (mean), the determinant
/// root a (variance), the index 1..10 (covariance, skewness, kurtosis).
/// dc is the number of changed coordinates for mean and variance.
Scenario sensitivity_scenario(ChangeType type, double size, std::size_t dc, std::size_t n, std::size_t d,
                              std::size_t tau);

/// Per-study settings; every study reads only the keys it needs.
struct StudyConfig {
    std::string study = "size"; // size, power, type2, sensitivity
    std::size_t n = 1000;
    std::size_t d = 25;
    std::size_t tau = 250;
    std::size_t replicates = 100;
    std::uint64_t seed = 1;
    std::size_t k = 5;
    double alpha = 0.05;
    std::vector<double> alphas{0.10, 0.05, 0.01};
    std::vector<std::string> scenarios;
    std::vector<std::size_t> dims;
    std::vector<std::string> changes{"mean", "variance", "covariance", "skewness", "kurtosis"};
    std::vector<std::size_t> dcs{1000};
    std::vector<double> sizes;
    DetectMode mode = DetectMode::analytic;
    std::size_t permutations = 1000;
    std::size_t workers = 0;
};

/// key = value lines; '#' starts a comment; lists are comma separated.
StudyConfig parse_study_config(std::string_view text);

/// Named presets: tableV, tableV-scaled, tableVI, tableVI-scaled, tableVII,
/// tableVII-scaled, sensitivity, sensitivity-scaled.
StudyConfig study_preset(std::string_view name);

/// Multiplies replicates by `scale` (at least 1 replicate).
void scale_replicates(StudyConfig& config, double scale);

struct SizeRow {
    double alpha = 0;
    std::size_t rejections = 0;
    std::size_t replicates = 0;
    double fraction = 0;
    double se = 0;
};

struct CountRow {
    std::string scenario;
    std::size_t d = 0;
    std::string parameter;
    double value = 0;
    std::size_t rejections = 0;
    std::size_t replicates = 0;
};

struct CurveRow {
    std::string change;
    std::size_t dc = 0;
    double size = 0;
    std::size_t detections = 0;
    std::size_t replicates = 0;
};

/// p-value of each replicate of a scenario under the configured test.
std::vector<double> replicate_pvalues(const Scenario& scenario, std::size_t replicates,
                                      const StudyConfig& config);

std::vector<SizeRow> run_size_study(const StudyConfig& config);
/// Rejection counts at config.alpha for power scenarios.
std::vector<CountRow> run_power_study(const StudyConfig& config);
/// Non-rejection counts at config.alpha for type II settings.
std::vector<CountRow> run_type2_study(const StudyConfig& config);
std::vector<CurveRow> run_sensitivity_study(const StudyConfig& config);

std::string size_csv(const std::vector<SizeRow>& rows);
std::string count_csv(const std::vector<CountRow>& rows, std::string_view count_name);
std::string curve_csv(const std::vector<CurveRow>& rows);

} // namespace knncp::simlab
