#pragma once

// Reference scaling fits used as synthetic ground truth. Each row holds the
// noise power, fitted (a, b), the fit chi-square and its quoted tail value.

#include <array>

namespace reference {

struct FitRow {
    double p_bar;
    double a;
    double b;
    double chi2;
    double p_value;
    int dof;  // degrees of freedom reproducing p_value from chi2
};

inline constexpr std::array<FitRow, 7> kPowerLaw{{
    {0.000, 0.1016, 2.079, 0.321, 0.9999, 7},
    {0.001, 0.07863, 2.200, 0.539, 0.9993, 7},
    {0.003, 0.02595, 2.753, 0.869, 0.9967, 7},
    {0.005, 0.02611, 2.816, 1.097, 0.9976, 8},
    {0.007, 0.03783, 2.698, 2.919, 0.9393, 8},
    {0.009, 0.07251, 2.458, 3.449, 0.9032, 8},
    {0.013, 0.1636, 2.148, 2.689, 0.9523, 8},
}};

inline constexpr std::array<FitRow, 7> kExponential{{
    {0.000, 4.707, 0.1282, 0.296, 0.9999, 7},
    {0.001, 2.208, 0.1845, 0.185, 0.9999, 7},
    {0.003, 1.580, 0.2302, 0.517, 0.9994, 7},
    {0.005, 3.123, 0.1915, 3.307, 0.9136, 8},
    {0.007, 3.924, 0.1799, 4.833, 0.7753, 8},
    {0.009, 5.445, 0.1601, 4.927, 0.7653, 8},
    {0.013, 7.112, 0.1440, 3.172, 0.9231, 8},
}};

struct RestrictedRow {
    double p_bar;
    double a_low, b_low;    // 7 <= N <= 10
    double a_high, b_high;  // 13 <= N <= 16
};

inline constexpr std::array<RestrictedRow, 4> kRestricted{{
    {0.005, 3.064e-2, 2.730, 6.554e-2, 2.465},
    {0.007, 7.637e-3, 3.450, 2.984e-2, 2.767},
    {0.009, 7.086e-3, 3.560, 2.934e-2, 2.774},
    {0.013, 3.201e-2, 2.924, 3.060e-2, 2.759},
}};

}  // namespace reference
