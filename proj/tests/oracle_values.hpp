#pragma once

// Frozen optima from tests/oracles/convex_oracle.py (CLARABEL via cvxpy).

#include <array>
#include <string_view>
#include <vector>

namespace oracle {

struct Toy {
  std::vector<double> signal;
  std::vector<std::vector<double>> filters;  // unnormalized, length 3
};

inline const Toy kToyA{{0.0, 0.3, 0.9, -0.4, 0.1, 0.0, -0.7, 0.5, 0.2, 0.0, 0.6, -0.2},
                       {{1.0, -1.0, 0.0}, {1.0, 2.0, 1.0}, {0.5, -1.0, 0.5}}};
inline const Toy kToyB{{0.5, -0.5, 0.25, 0.0, 0.0, 1.0, -1.0, 0.0, 0.3, 0.2, -0.1, 0.0},
                       {{1.0, 0.5, -0.25}, {-0.3, 1.0, 0.2}}};

inline const Toy kToyC{{0.2, -0.6, 1.0, 0.4, 0.0, -0.3, 0.8, 0.1},
                       {{1.0, -0.5, 0.2}, {0.3, 0.9, 0.3}}};

inline constexpr double kLambdaL1 = 0.1;
inline constexpr double kLambdaL1Inf = 0.4;
inline constexpr double kLambdaL12 = 0.2;

inline const std::vector<double> kGroupWeights{1.0, 0.5, 2.0, 1.0, 1.5, 0.8,
                                               1.2, 1.0, 0.6, 1.4, 1.0, 0.9};

struct Optimum {
  std::string_view toy;
  std::string_view kind;
  bool weighted;  // stripe inner kernels and kGroupWeights
  double value;
};

inline constexpr std::array<Optimum, 10> kOptima{{
    {"a", "l1", false, 0.297289165304},
    {"a", "l1inf", false, 0.393413187838},
    {"a", "l12", false, 0.507729908881},
    {"a", "l1inf", true, 0.450501021435},
    {"a", "l12", true, 0.425789578702},
    {"b", "l1", false, 0.343588592002},
    {"b", "l1inf", false, 0.609673524294},
    {"b", "l12", false, 0.643743385582},
    {"b", "l1inf", true, 0.498572503547},
    {"b", "l12", true, 0.49731187144},
}};

inline constexpr double kToyCL1 = 0.293185485309;

// argmin_x tau f(G|x|) + 1/2 ||x - v||^2, unit kernel of length 2.
inline const std::vector<double> kProxV{1.5, -0.4, 0.9, 2.0, -1.1, 0.3};
inline constexpr double kProxTau = 0.5;
inline constexpr double kProxMax = 1.3225000002;
inline constexpr double kProxL2 = 2.20405559011;

}  // namespace oracle
