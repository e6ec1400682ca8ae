#include <knncp/simlab.hpp>

#include <knncp/errors.hpp>
#include <knncp/parallel.hpp>
#include <knncp/random.hpp>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/lognormal_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/student_t_distribution.hpp>
#include <boost/random/weibull_distribution.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

namespace knncp::simlab {
namespace {

constexpr double kPowerDelta[6][5] = {
    {0.10, 0.20, 0.45, 0.63, 0.89}, {0.20, 0.40, 0.67, 0.63, 0.89}, {0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0},                {0.05, 0.10, 0.22, 0.32, 0.45}, {0.20, 0.40, 0.67, 0.63, 0.89},
};
constexpr double kPowerB[6][5] = {
    {1.10, 1.06, 1.03, 1.02, 1.02}, {1.8, 2.4, 3.2, 4.8, 6.2},      {1.10, 1.06, 1.03, 1.02, 1.02},
    {0.53, 0.50, 0.48, 0.47, 0.46}, {1.10, 1.08, 1.05, 1.04, 1.03}, {1.14, 1.08, 1.05, 1.04, 1.03},
};
constexpr double kType2Value[6][5] = {
    {3.27, 3.20, 3.15, 3.12, 3.09},      {1.8, 2.4, 3.2, 4.8, 6.2},
    {1.09, 1.08, 1.05, 1.04, 1.03},      {1.050, 1.040, 1.030, 1.025, 1.020},
    {0.590, 0.550, 0.530, 0.520, 0.512}, {0.590, 0.550, 0.530, 0.520, 0.512},
};
constexpr double kSigmaRho = 0.6;

std::size_t grid_column(std::size_t d) {
    for (std::size_t i = 0; i < 5; ++i) {
        if (kGridDimensions[i] == d) {
            return i;
        }
    }
    throw InvalidArgument("d = " + std::to_string(d) + " is not one of 25, 100, 500, 1000, 2000");
}

int scenario_index(std::string_view name, char prefix) {
    if (name.size() == 2 && name[0] == prefix && name[1] >= '1' && name[1] <= '6') {
        return name[1] - '1';
    }
    throw InvalidArgument("unknown scenario '" + std::string(name) + "'");
}

DistributionSpec gaussian(double rho = 0.0) {
    DistributionSpec s;
    s.rho = rho;
    return s;
}

DistributionSpec family(Family f, double p1, double p2 = 1.0) {
    DistributionSpec s;
    s.family = f;
    s.param1 = p1;
    s.param2 = p2;
    return s;
}

using Sampler = std::variant<boost::random::normal_distribution<double>,
                             boost::random::chi_squared_distribution<double>,
                             boost::random::student_t_distribution<double>,
                             boost::random::lognormal_distribution<double>,
                             boost::random::weibull_distribution<double>,
                             boost::random::gamma_distribution<double>,
                             boost::random::beta_distribution<double>>;

Sampler make_sampler(const DistributionSpec& s) {
    switch (s.family) {
    case Family::gaussian:
        return boost::random::normal_distribution<double>(s.param1, s.param2);
    case Family::chi_square:
        return boost::random::chi_squared_distribution<double>(s.param1);
    case Family::student_t:
        return boost::random::student_t_distribution<double>(s.param1);
    case Family::lognormal:
        return boost::random::lognormal_distribution<double>(s.param1, s.param2);
    case Family::weibull:
        return boost::random::weibull_distribution<double>(s.param1, s.param2);
    case Family::gamma:
        return boost::random::gamma_distribution<double>(s.param1, s.param2);
    case Family::beta:
        return boost::random::beta_distribution<double>(s.param1, s.param2);
    }
    throw UnknownFamily("unknown family");
}

// Fills out with one observation drawn from spec.
class RowSampler {
public:
    explicit RowSampler(const DistributionSpec& spec)
        : spec_(spec), sampler_(make_sampler(spec)), offset_(spec.centered ? family_mean(spec) : 0.0),
          mix_(std::sqrt(1.0 - spec.rho * spec.rho)), scale_(std::sqrt(spec.variance_scale)) {}

    void draw(std::mt19937_64& engine, std::span<double> out) {
        const std::size_t d = out.size();
        const std::size_t changed = spec_.subset == 0 ? d : std::min(spec_.subset, d);
        double prev = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double u = std::visit([&](auto& dist) { return dist(engine); }, sampler_) - offset_;
            const double x = j == 0 || spec_.rho == 0.0 ? u : spec_.rho * prev + mix_ * u;
            prev = x;
            out[j] = j < changed ? scale_ * x + spec_.mean_shift : x;
        }
    }

private:
    DistributionSpec spec_;
    Sampler sampler_;
    double offset_;
    double mix_;
    double scale_;
};

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = std::min(text.find(',', start), text.size());
        std::string_view item = text.substr(start, comma - start);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) {
            item.remove_prefix(1);
        }
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) {
            item.remove_suffix(1);
        }
        if (!item.empty()) {
            out.emplace_back(item);
        }
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("bad value '" + std::string(text) + "' for key '" + std::string(key) + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_numbers(std::string_view key, std::string_view text) {
    std::vector<T> out;
    for (const std::string& item : split_list(text)) {
        out.push_back(parse_number<T>(key, item));
    }
    return out;
}

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// "S1@25" -> ("S1", 25); plain names use every configured dimension.
std::vector<std::pair<std::string, std::size_t>> expand_grid(const StudyConfig& config,
                                                             const std::vector<std::string>& defaults) {
    const auto& names = config.scenarios.empty() ? defaults : config.scenarios;
    std::vector<std::size_t> dims = config.dims;
    if (dims.empty()) {
        dims.assign(std::begin(kGridDimensions), std::end(kGridDimensions));
    }
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const std::string& name : names) {
        const std::size_t at = name.find('@');
        if (at != std::string::npos) {
            out.emplace_back(name.substr(0, at), parse_number<std::size_t>("scenarios", name.substr(at + 1)));
        } else {
            for (std::size_t d : dims) {
                out.emplace_back(name, d);
            }
        }
    }
    return out;
}

std::vector<double> default_sizes(ChangeType type) {
    switch (type) {
    case ChangeType::mean:
        return {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    case ChangeType::variance:
        return {1.0, 1.002, 1.004, 1.006, 1.008, 1.010};
    default:
        return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    }
}

} // namespace

Family parse_family(std::string_view name) {
    if (name == "gaussian" || name == "normal") return Family::gaussian;
    if (name == "chi_square" || name == "chisq") return Family::chi_square;
    if (name == "t" || name == "student_t") return Family::student_t;
    if (name == "lognormal") return Family::lognormal;
    if (name == "weibull") return Family::weibull;
    if (name == "gamma") return Family::gamma;
    if (name == "beta") return Family::beta;
    throw UnknownFamily("unknown distribution family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) {
    switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::chi_square: return "chi_square";
    case Family::student_t: return "t";
    case Family::lognormal: return "lognormal";
    case Family::weibull: return "weibull";
    case Family::gamma: return "gamma";
    case Family::beta: return "beta";
    }
    return "gaussian";
}

void validate(const DistributionSpec& s) {
    const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    bool ok = true;
    switch (s.family) {
    case Family::gaussian:
    case Family::lognormal:
        ok = std::isfinite(s.param1) && positive(s.param2);
        break;
    case Family::chi_square:
    case Family::student_t:
        ok = positive(s.param1);
        break;
    case Family::weibull:
    case Family::gamma:
    case Family::beta:
        ok = positive(s.param1) && positive(s.param2);
        break;
    }
    if (!ok) {
        throw InvalidArgument("invalid parameters (" + fmt(s.param1) + ", " + fmt(s.param2) + ") for " +
                              std::string(to_string(s.family)));
    }
    if (!(std::abs(s.rho) < 1.0) || !positive(s.variance_scale) || !std::isfinite(s.mean_shift)) {
        throw InvalidArgument("need |rho| < 1, variance_scale > 0 and a finite mean shift");
    }
    if (s.centered && s.family == Family::student_t && s.param1 <= 1.0) {
        throw InvalidArgument("t with df <= 1 has no mean to center");
    }
}

double family_mean(const DistributionSpec& s) {
    switch (s.family) {
    case Family::gaussian: return s.param1;
    case Family::chi_square: return s.param1;
    case Family::student_t: return s.param1 > 1.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    case Family::lognormal: return std::exp(s.param1 + 0.5 * s.param2 * s.param2);
    case Family::weibull: return s.param2 * std::tgamma(1.0 + 1.0 / s.param1);
    case Family::gamma: return s.param1 * s.param2;
    case Family::beta: return s.param1 / (s.param1 + s.param2);
    }
    return 0.0;
}

double family_variance(const DistributionSpec& s) {
    switch (s.family) {
    case Family::gaussian: return s.param2 * s.param2;
    case Family::chi_square: return 2.0 * s.param1;
    case Family::student_t:
        return s.param1 > 2.0 ? s.param1 / (s.param1 - 2.0) : std::numeric_limits<double>::infinity();
    case Family::lognormal: {
        const double v = s.param2 * s.param2;
        return std::expm1(v) * std::exp(2.0 * s.param1 + v);
    }
    case Family::weibull: {
        const double g1 = std::tgamma(1.0 + 1.0 / s.param1);
        return s.param2 * s.param2 * (std::tgamma(1.0 + 2.0 / s.param1) - g1 * g1);
    }
    case Family::gamma: return s.param1 * s.param2 * s.param2;
    case Family::beta: {
        const double t = s.param1 + s.param2;
        return s.param1 * s.param2 / (t * t * (t + 1.0));
    }
    }
    return 0.0;
}

DataMatrix sample(const DistributionSpec& spec, std::size_t n, std::size_t d, std::uint64_t seed,
                  std::uint64_t stream) {
    validate(spec);
    auto engine = stream_engine(seed, stream, 0x53494d4cu); // "SIML"
    RowSampler rows(spec);
    std::vector<double> values(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        rows.draw(engine, std::span<double>(values.data() + i * d, d));
    }
    return DataMatrix(n, d, std::move(values));
}

DataMatrix generate(const Scenario& sc, std::size_t replicate) {
    if (sc.d == 0 || sc.n == 0 || sc.tau > sc.n) {
        throw InvalidArgument("scenario '" + sc.name + "' needs d >= 1 and tau <= n");
    }
    validate(sc.f0);
    validate(sc.f1);
    auto engine = stream_engine(sc.seed, replicate, 0x53494d4cu);
    RowSampler before(sc.f0);
    RowSampler after(sc.f1);
    std::vector<double> values(sc.n * sc.d);
    for (std::size_t i = 0; i < sc.n; ++i) {
        std::span<double> row(values.data() + i * sc.d, sc.d);
        (i < sc.tau ? before : after).draw(engine, row);
    }
    return DataMatrix(sc.n, sc.d, std::move(values));
}

Scenario power_scenario(std::string_view name, std::size_t d) {
    const int s = scenario_index(name, 'S');
    const std::size_t col = grid_column(d);
    Scenario sc;
    sc.name = std::string(name);
    sc.d = d;
    const double delta = kPowerDelta[s][col];
    const double b = kPowerB[s][col];
    switch (s) {
    case 0: // N(0, Sigma) -> N(a 1, b Sigma)
        sc.f0 = gaussian(kSigmaRho);
        sc.f1 = sc.f0;
        sc.f1.mean_shift = delta / std::sqrt(static_cast<double>(d));
        sc.f1.variance_scale = b;
        break;
    case 1: // first 5 coordinates: mean a, variance b
        sc.f0 = gaussian();
        sc.f1 = sc.f0;
        sc.f1.subset = 5;
        sc.f1.mean_shift = delta / std::sqrt(5.0);
        sc.f1.variance_scale = b;
        break;
    case 2: // N(0, I) -> N(0, b I)
        sc.f0 = gaussian();
        sc.f1 = sc.f0;
        sc.f1.variance_scale = b;
        break;
    case 3: // rho 0.6 -> rho'
        sc.f0 = gaussian(kSigmaRho);
        sc.f1 = gaussian(b);
        break;
    case 4:
    case 5: {
        sc.f0 = s == 4 ? family(Family::chi_square, 3.0) : family(Family::student_t, 5.0);
        sc.f0.centered = s == 4;
        sc.f0.rho = kSigmaRho;
        sc.f1 = sc.f0;
        sc.f1.variance_scale = b;
        sc.f1.mean_shift = delta / std::sqrt(static_cast<double>(d));
        break;
    }
    default:
        break;
    }
    return sc;
}

Scenario power_scenario_s2_weibull(std::size_t d) {
    Scenario sc;
    sc.name = "S2w";
    sc.d = d;
    sc.f0 = family(Family::weibull, 1.0, 1.0);
    sc.f0.subset = 5;
    sc.f1 = family(Family::weibull, 1.0, kPowerB[1][grid_column(d)]);
    sc.f1.subset = 5;
    return sc;
}

Scenario type2_scenario(std::string_view name, std::size_t d) {
    const int s = scenario_index(name, 'T');
    const double v = kType2Value[s][grid_column(d)];
    Scenario sc;
    sc.name = std::string(name);
    sc.d = d;
    switch (s) {
    case 0:
        sc.f0 = family(Family::chi_square, 3.0);
        sc.f1 = family(Family::chi_square, v);
        break;
    case 1: // Weibull(shape k0 = 1, scale lambda)
        sc.f0 = family(Family::weibull, 1.0, 1.0);
        sc.f1 = family(Family::weibull, 1.0, v);
        break;
    case 2: // Gamma(shape, scale 1)
        sc.f0 = family(Family::gamma, 1.0, 1.0);
        sc.f1 = family(Family::gamma, v, 1.0);
        break;
    case 3: // Gamma(shape 1, scale)
        sc.f0 = family(Family::gamma, 1.0, 1.0);
        sc.f1 = family(Family::gamma, 1.0, v);
        break;
    case 4:
        sc.f0 = family(Family::beta, 0.5, 0.5);
        sc.f1 = family(Family::beta, v, 0.5);
        break;
    default:
        sc.f0 = family(Family::beta, 0.5, 0.5);
        sc.f1 = family(Family::beta, 0.5, v);
        break;
    }
    return sc;
}

Scenario null_scenario(std::size_t n, std::size_t d) {
    Scenario sc;
    sc.name = "null";
    sc.n = n;
    sc.d = d;
    sc.tau = n;
    sc.f0 = gaussian();
    sc.f1 = sc.f0;
    return sc;
}

ChangeType parse_change_type(std::string_view name) {
    if (name == "mean") return ChangeType::mean;
    if (name == "variance") return ChangeType::variance;
    if (name == "covariance") return ChangeType::covariance;
    if (name == "skewness") return ChangeType::skewness;
    if (name == "kurtosis") return ChangeType::kurtosis;
    throw InvalidArgument("unknown change type '" + std::string(name) + "'");
}

std::string_view to_string(ChangeType t) {
    switch (t) {
    case ChangeType::mean: return "mean";
    case ChangeType::variance: return "variance";
    case ChangeType::covariance: return "covariance";
    case ChangeType::skewness: return "skewness";
    case ChangeType::kurtosis: return "kurtosis";
    }
    return "mean";
}

Scenario sensitivity_scenario(ChangeType type, double size, std::size_t dc, std::size_t n, std::size_t d,
                              std::size_t tau) {
    Scenario sc;
    sc.name = std::string(to_string(type));
    sc.n = n;
    sc.d = d;
    sc.tau = tau;
    dc = std::clamp<std::size_t>(dc, 1, d);
    switch (type) {
    case ChangeType::mean:
        sc.f0 = gaussian();
        sc.f1 = sc.f0;
        sc.f1.subset = dc;
        sc.f1.mean_shift = size / std::sqrt(static_cast<double>(dc));
        break;
    case ChangeType::variance:
        // determinant a^d spread over dc coordinates
        if (!(size > 0.0)) {
            throw InvalidArgument("variance change needs a > 0");
        }
        sc.f0 = gaussian();
        sc.f1 = sc.f0;
        sc.f1.subset = dc;
        sc.f1.variance_scale = std::pow(size, static_cast<double>(d) / static_cast<double>(dc));
        break;
    case ChangeType::covariance:
        sc.f0 = gaussian(kSigmaRho);
        sc.f1 = gaussian(kSigmaRho - 0.02 * size);
        break;
    case ChangeType::skewness: {
        // chi-square with skewness sqrt(8 / nu) = 0.2 size, against a Gaussian with matching mean and sd
        const double skew = 0.2 * size;
        if (!(skew > 0.0)) {
            throw InvalidArgument("skewness index must be positive");
        }
        const double nu = 8.0 / (skew * skew);
        sc.f0 = family(Family::gaussian, nu, std::sqrt(2.0 * nu));
        sc.f1 = family(Family::chi_square, nu);
        break;
    }
    case ChangeType::kurtosis: {
        // t with excess kurtosis 6 / (nu - 4) = 0.01 size
        const double excess = 0.01 * size;
        if (!(excess > 0.0)) {
            throw InvalidArgument("kurtosis index must be positive");
        }
        sc.f0 = gaussian();
        sc.f1 = family(Family::student_t, 4.0 + 6.0 / excess);
        break;
    }
    }
    return sc;
}

StudyConfig parse_study_config(std::string_view text) {
    StudyConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument("line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "preset") {
            c = study_preset(value);
        } else if (key == "study") {
            if (value != "size" && value != "power" && value != "type2" && value != "sensitivity") {
                throw InvalidArgument("unknown study '" + value + "'");
            }
            c.study = value;
        } else if (key == "n") {
            c.n = parse_number<std::size_t>(key, value);
        } else if (key == "d") {
            c.d = parse_number<std::size_t>(key, value);
        } else if (key == "tau") {
            c.tau = parse_number<std::size_t>(key, value);
        } else if (key == "replicates") {
            c.replicates = parse_number<std::size_t>(key, value);
        } else if (key == "seed") {
            c.seed = parse_number<std::uint64_t>(key, value);
        } else if (key == "k") {
            c.k = parse_number<std::size_t>(key, value);
        } else if (key == "alpha") {
            c.alpha = parse_number<double>(key, value);
        } else if (key == "alphas") {
            c.alphas = parse_numbers<double>(key, value);
        } else if (key == "scenarios") {
            c.scenarios = split_list(value);
        } else if (key == "dims") {
            c.dims = parse_numbers<std::size_t>(key, value);
        } else if (key == "changes") {
            c.changes = split_list(value);
        } else if (key == "dcs") {
            c.dcs = parse_numbers<std::size_t>(key, value);
        } else if (key == "sizes") {
            c.sizes = parse_numbers<double>(key, value);
        } else if (key == "mode") {
            c.mode = parse_detect_mode(value);
        } else if (key == "permutations") {
            c.permutations = parse_number<std::size_t>(key, value);
        } else if (key == "workers") {
            c.workers = parse_number<std::size_t>(key, value);
        } else {
            throw InvalidArgument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    return c;
}

StudyConfig study_preset(std::string_view name) {
    StudyConfig c;
    if (name == "tableV" || name == "tableV-scaled") {
        c.study = "size";
        c.n = 1000;
        c.d = 25;
        c.replicates = name == "tableV" ? 10000 : 1000;
    } else if (name == "tableVI" || name == "tableVI-scaled") {
        c.study = "type2";
        c.scenarios = {"T1", "T2", "T3", "T4", "T5", "T6"};
        if (name == "tableVI-scaled") {
            c.dims = {25, 100};
        }
    } else if (name == "tableVII" || name == "tableVII-scaled") {
        c.study = "power";
        c.scenarios = {"S1", "S2", "S3", "S4", "S5", "S6"};
        if (name == "tableVII-scaled") {
            c.scenarios = {"S1@25", "S3@2000", "S4@100"};
        }
    } else if (name == "sensitivity" || name == "sensitivity-scaled") {
        c.study = "sensitivity";
        c.d = 1000;
        c.dcs = {1000, 200, 50, 10, 1};
        if (name == "sensitivity-scaled") {
            c.d = 200;
            c.dcs = {200, 10, 1};
            c.replicates = 20;
        }
    } else {
        throw InvalidArgument("unknown preset '" + std::string(name) + "'");
    }
    return c;
}

void scale_replicates(StudyConfig& config, double scale) {
    if (!(scale > 0.0)) {
        throw InvalidArgument("scale must be positive");
    }
    config.replicates = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(config.replicates) * scale)));
}

std::vector<double> replicate_pvalues(const Scenario& scenario, std::size_t replicates,
                                      const StudyConfig& config) {
    std::vector<double> p(replicates, 1.0);
    parallel_for(
        replicates,
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t r = begin; r < end; ++r) {
                const DataMatrix data = generate(scenario, r);
                DetectOptions opts;
                opts.k = config.k;
                opts.alpha = config.alpha;
                opts.mode = config.mode;
                opts.permutations = config.permutations;
                opts.seed = scenario.seed + r;
                opts.graph.workers = 1;
                try {
                    const ScanReport report = detect_single(data, opts);
                    if (report.tested) {
                        p[r] = *report.decision_p();
                    }
                } catch (const DegenerateVariance&) {
                    p[r] = 1.0;
                }
            }
        },
        config.workers);
    return p;
}

std::vector<SizeRow> run_size_study(const StudyConfig& config) {
    Scenario sc = null_scenario(config.n, config.d);
    sc.seed = config.seed;
    const std::vector<double> p = replicate_pvalues(sc, config.replicates, config);
    std::vector<SizeRow> rows;
    for (double alpha : config.alphas) {
        SizeRow row;
        row.alpha = alpha;
        row.replicates = p.size();
        row.rejections = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= alpha; }));
        row.fraction = static_cast<double>(row.rejections) / static_cast<double>(row.replicates);
        row.se = std::sqrt(row.fraction * (1.0 - row.fraction) / static_cast<double>(row.replicates));
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::vector<CountRow> run_grid(const StudyConfig& config, bool power) {
    const std::vector<std::string> defaults =
        power ? std::vector<std::string>{"S1", "S2", "S3", "S4", "S5", "S6"}
              : std::vector<std::string>{"T1", "T2", "T3", "T4", "T5", "T6"};
    const auto grid = expand_grid(config, defaults);
    std::vector<Scenario> scenarios;
    for (const auto& [name, d] : grid) {
        Scenario sc = power ? (name == "S2w" ? power_scenario_s2_weibull(d) : power_scenario(name, d))
                            : type2_scenario(name, d);
        sc.n = config.n;
        sc.tau = config.tau;
        sc.seed = config.seed;
        scenarios.push_back(sc);
    }
    std::vector<CountRow> rows;
    for (const Scenario& sc : scenarios) {
        const std::vector<double> p = replicate_pvalues(sc, config.replicates, config);
        const auto rejected = static_cast<std::size_t>(
            std::count_if(p.begin(), p.end(), [&](double v) { return v <= config.alpha; }));
        CountRow row;
        row.scenario = sc.name;
        row.d = sc.d;
        row.replicates = p.size();
        row.rejections = power ? rejected : p.size() - rejected;
        const std::size_t col = grid_column(sc.d);
        if (power) {
            const int s = sc.name == "S2w" ? 1 : scenario_index(sc.name, 'S');
            row.parameter = s == 3 ? "rho" : "b";
            row.value = kPowerB[s][col];
        } else {
            static constexpr const char* kNames[6] = {"nu1", "lambda1", "alpha1", "beta1", "alpha1", "beta1"};
            const int s = scenario_index(sc.name, 'T');
            row.parameter = kNames[s];
            row.value = kType2Value[s][col];
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace

std::vector<CountRow> run_power_study(const StudyConfig& config) { return run_grid(config, true); }

std::vector<CountRow> run_type2_study(const StudyConfig& config) { return run_grid(config, false); }

std::vector<CurveRow> run_sensitivity_study(const StudyConfig& config) {
    std::vector<CurveRow> rows;
    for (const std::string& name : config.changes) {
        const ChangeType type = parse_change_type(name);
        const std::vector<double> sizes = config.sizes.empty() ? default_sizes(type) : config.sizes;
        const bool per_subset = type == ChangeType::mean || type == ChangeType::variance;
        const std::vector<std::size_t> dcs = per_subset ? config.dcs : std::vector<std::size_t>{config.d};
        for (std::size_t dc : dcs) {
            for (double size : sizes) {
                Scenario sc = sensitivity_scenario(type, size, dc, config.n, config.d, config.tau);
                sc.seed = config.seed;
                const std::vector<double> p = replicate_pvalues(sc, config.replicates, config);
                CurveRow row;
                row.change = name;
                row.dc = std::min(dc, config.d);
                row.size = size;
                row.replicates = p.size();
                row.detections = static_cast<std::size_t>(
                    std::count_if(p.begin(), p.end(), [&](double v) { return v <= config.alpha; }));
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string size_csv(const std::vector<SizeRow>& rows) {
    std::string out = "alpha,rejections,replicates,fraction,se\n";
    for (const SizeRow& r : rows) {
        out += fmt(r.alpha) + ',' + std::to_string(r.rejections) + ',' + std::to_string(r.replicates) + ',' +
               fmt(r.fraction) + ',' + fmt(r.se) + '\n';
    }
    return out;
}

std::string count_csv(const std::vector<CountRow>& rows, std::string_view count_name) {
    std::string out = "scenario,d,parameter,value," + std::string(count_name) + ",replicates\n";
    for (const CountRow& r : rows) {
        out += r.scenario + ',' + std::to_string(r.d) + ',' + r.parameter + ',' + fmt(r.value) + ',' +
               std::to_string(r.rejections) + ',' + std::to_string(r.replicates) + '\n';
    }
    return out;
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
    std::string out = "change,dc,size,detections,replicates,fraction\n";
    for (const CurveRow& r : rows) {
        out += r.change + ',' + std::to_string(r.dc) + ',' + fmt(r.size) + ',' + std::to_string(r.detections) +
               ',' + std::to_string(r.replicates) + ',' +
               fmt(static_cast<double>(r.detections) / static_cast<double>(r.replicates)) + '\n';
    }
    return out;
}

} // namespace knncp::simlab
