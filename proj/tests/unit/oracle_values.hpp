// Generated by tests/oracles/generate_oracles.py
#pragma once

namespace oracle {

inline constexpr double bessel_k0_1 = 0.42102443824070833334;
inline constexpr double bessel_k1_1 = 0.60190723019723457474;
inline constexpr double bessel_k0_0p01 = 4.7212447301610949651;
inline constexpr double scaled_k0_50_ratio = 0.9975275563146629692;
inline constexpr double phi0_n2_p3 = 2.39195640372014;
inline constexpr double tail_n2_p3 = 10.86133967;
inline constexpr double h1sq_n2_p3 = 46.5047590098;
inline constexpr double interaction12_n2_p3 = 0.00103839106818;
inline constexpr double phi0_n3_p26 = 4.25096951511577;
inline constexpr double tail_n3_p26 = 77.99138749;
inline constexpr double h1sq_n3_p26 = 608.153137482;
inline constexpr double phi0_n2_p27 = 2.46913326750441;
inline constexpr double tail_n2_p27 = 24.29971801;
inline constexpr double h1sq_n2_p27 = 66.3693203961;
inline constexpr double interaction12_n2_p27 = 0.00515832999149;

}  // namespace oracle
