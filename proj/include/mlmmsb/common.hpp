#ifndef MLMMSB_COMMON_HPP
#define MLMMSB_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlmmsb {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

// Error hierarchy. Everything thrown by the library derives from Error so the
// CLI can map it to a data-error exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define MLMMSB_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return #Name; }   \
  }

MLMMSB_DEFINE_ERROR(DimensionError);
MLMMSB_DEFINE_ERROR(ConfigError);
MLMMSB_DEFINE_ERROR(UnsupportedInputError);
MLMMSB_DEFINE_ERROR(RankDeficiencyError);
MLMMSB_DEFINE_ERROR(IllConditionedCornerError);
MLMMSB_DEFINE_ERROR(UnsupportedKError);
MLMMSB_DEFINE_ERROR(EmptyNetworkError);
MLMMSB_DEFINE_ERROR(ModelSelectionError);
MLMMSB_DEFINE_ERROR(UnusableDataError);
MLMMSB_DEFINE_ERROR(ParseError);
MLMMSB_DEFINE_ERROR(IoError);

#undef MLMMSB_DEFINE_ERROR

/// Non-fatal conditions collected while running a pipeline.
struct Diagnostics {
  std::vector<std::string> warnings;
  int zero_row_fallbacks = 0;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
  void merge(const Diagnostics& other) {
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    zero_row_fallbacks += other.zero_row_fallbacks;
  }
};

enum class Method { SPSum, SPDSoS, SPSoS };

inline constexpr Method kAllMethods[] = {Method::SPSum, Method::SPDSoS, Method::SPSoS};

/// Lowercase identifier used on the command line and in CSV files.
std::string_view method_name(Method m);
Method parse_method(std::string_view name);

// Counter-based seed derivation. Streams for (seed, a, b, ...) are
// independent of evaluation order, so parallel runs reproduce serial ones.
std::uint64_t splitmix64(std::uint64_t x);

inline std::uint64_t derive_seed(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t first, Rest... rest) {
  return derive_seed(splitmix64(seed ^ splitmix64(first + 0x632be59bd9b4e019ULL)),
                     static_cast<std::uint64_t>(rest)...);
}

/// Platform-stable uniform draws: std::mt19937_64 is fully specified, the
/// standard distributions are not, so doubles are built from raw bits.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mlmmsb

#endif  // MLMMSB_COMMON_HPP
