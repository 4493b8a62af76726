#pragma once

// High-precision constants from tests/oracles/freeze_constants.py (mpmath, 30 digits).
namespace ccmfbm::ref {

inline constexpr double kC060 = 0.10760051841318071863;
inline constexpr double kC075 = 0.26741115875799758103;
inline constexpr double kC090 = 0.32448825925734100591;

// K_H(t, s) at H = 0.75, t = 1.
inline constexpr double kK075_1_05 = 0.9375919636980572333;
inline constexpr double kK075_1_03 = 1.0617937845916284687;

// gamma_2(1, 0.5) at H = 0.75 as the convolution int_s^t G(s,v) K_H(t,v) dv.
inline constexpr double kGamma2_075_1_05 = 0.8023276115465949;

// int_0^1 K_H(1, u) du at H = 0.75.
inline constexpr double kCross075_1_1 = 0.9504611797752525;

}  // namespace ccmfbm::ref
