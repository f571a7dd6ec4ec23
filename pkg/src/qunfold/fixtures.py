"""Published reference numbers used by the golden tests and the demo.

Vectors are in ascending label order, i.e. index = int(label, 2) with the
label read qubit 0 first.
"""

import numpy as np

# one-qubit calibration: 8000 shots each for |0> and |1>
R_1Q_COUNTS = np.array([[6892.0, 895.0],
                        [1108.0, 7105.0]])
R_1Q = np.array([[0.8615, 0.111875],
                 [0.1385, 0.888125]])

R_2Q = np.array([
    [0.851, 0.1185, 0.06425, 0.0135],
    [0.127625, 0.855375, 0.008875, 0.05325],
    [0.019, 0.00525, 0.816, 0.11625],
    [0.002375, 0.020875, 0.110875, 0.817],
])
R_2Q_COUNTS = np.rint(R_2Q * 8000)
CAL_SHOTS = 8000

R_2Q_INV = np.array([
    [1.20206606, -0.16605952, -0.09341977, 0.00425315],
    [-0.17936727, 1.19572556, 0.01152758, -0.07661078],
    [-0.02752246, 0.00046624, 1.25179634, -0.17769229],
    [0.00482367, -0.03013228, -0.16990414, 1.25004992],
])
R_2Q_DET = 0.46448

PSI_PLUS_TRUTH = np.array([0.0, 4000.0, 4000.0, 0.0])
PSI_PLUS_M = np.array([606.0, 3115.0, 3656.0, 623.0])
PSI_PLUS_M_ALT = np.array([750.0, 3100.0, 3550.0, 600.0])

MI_PSI_PLUS = np.array([-127.716, 3610.404, 4450.638, 66.672])
MI_PSI_PLUS_ALT = np.array([57.676, 3567.180, 4318.065, 57.077])

IBU_1Q_M = np.array([4151.0, 3849.0])
IBU_1Q = {
    1: [4193.165, 3806.834],
    2: [4277.457, 3722.542],
    3: [4314.417, 3685.582],
    10: [4343.410, 3656.589],
}

IBU_2Q_UNIFORM = {
    1: [947.003, 2651.760, 3255.226, 1146.008],
    5: [187.168, 3366.011, 4151.338, 295.481],
    10: [65.849, 3468.337, 4302.088, 163.724],
    100: [0.001, 3524.170, 4400.027, 75.801],
    1000: [0.0, 3524.179, 4400.088, 75.731],
}
IBU_2Q_INFORMED_PRIOR = np.array([0.0, 1.0, 1.0, 0.0])
IBU_2Q_INFORMED = {
    1: [0.0, 3598.040, 4401.959, 0.0],
    10: [0.0, 3533.524, 4466.475, 0.0],
}

# five-qubit hardware histograms (8192 shots)
M_UNIFORM_5Q = np.array([
    324, 220, 306, 262, 309, 294, 342, 311, 243, 188, 236, 215, 283, 218, 267, 242,
    264, 240, 265, 274, 281, 268, 299, 289, 220, 211, 224, 216, 242, 196, 222, 221,
], dtype=float)
T_GAUSS_5Q = np.array([
    12, 18, 31, 51, 75, 103, 141, 195, 240, 288, 342, 429, 449, 527, 566, 561,
    603, 563, 540, 470, 449, 369, 324, 236, 190, 150, 96, 67, 50, 25, 21, 11,
], dtype=float)
M_GAUSS_5Q = np.array([
    223, 327, 266, 383, 291, 346, 281, 289, 282, 329, 249, 409, 298, 330, 272, 273,
    356, 371, 353, 419, 282, 325, 270, 254, 149, 120, 129, 88, 77, 59, 49, 43,
], dtype=float)

GAUSS_5Q_NORMALIZED = np.array([
    0.04074024, 0.05150049, 0.06409340, 0.07852887, 0.09472390, 0.11248742,
    0.13151111, 0.15136836, 0.17152283, 0.19134754, 0.21015416, 0.22723083,
    0.24188595, 0.25349430, 0.26154108, 0.26565975, 0.26565975, 0.26154108,
    0.25349430, 0.24188595, 0.22723083, 0.21015416, 0.19134754, 0.17152283,
    0.15136836, 0.13151111, 0.11248742, 0.09472390, 0.07852887, 0.06409340,
    0.05150049, 0.04074024,
])

# synthetic world: 100-sample streams and the hand-traced prefix
TRUE_DATA = np.array([
    5.36588542, 1.30952955, 0.2894924, -5.59047811, -0.83216461, -1.06427694,
    -0.24822444, -1.88100203, -0.13145451, -1.43165409, -3.94159426, 2.65386714,
    2.64395413, 5.12871919, 0.15010093, -1.21403224, -1.63607984, -4.63943195,
    2.9471023, -3.30320289, -3.55513958, -0.6169497, 4.45844507, 0.7101488,
    -3.07135542, -2.1389796, 1.8757349, -0.48154009, -2.30650905, -0.69009217,
    2.2351688, 5.92833235, -3.73236999, -1.87925073, -2.41129828, -7.25724952,
    -2.77137607, -3.07162728, 3.37193388, -0.3957427, -4.86985634, 1.94002636,
    -1.06881228, -5.22942311, -1.78994893, -1.76578314, -2.62164689, 0.08914145,
    -6.7447733, -0.80328559, 3.03955033, 2.55839352, 3.3245625, 3.35817197,
    4.4626294, -3.35490205, 2.53750022, -5.58266859, -1.80865531, -5.74341613,
    3.14444254, 4.00121346, -0.59224404, 5.32393509, -2.02418253, 0.4518506,
    0.45883711, -3.19258582, 1.31383983, 5.81693538, -3.07479262, 2.69801534,
    -0.46352056, 5.30888191, 1.45136504, 2.0286492, 1.92948984, 0.74726012,
    -4.18729051, 4.17498872, -4.11200704, 0.71568958, 1.84223126, -2.51373682,
    0.43518964, 3.50364686, -0.07231341, -2.66597225, -8.74721326, -2.91552151,
    -1.77323622, -1.5492521, -2.87998854, 1.1318857, -1.72412526, -0.328363,
    2.0372148, -2.56631151, -0.90061822, 6.47444803,
])
TRUE_DATA_INT = np.array([
    5, 1, 0, -6, -1, -1, 0, -2, 0, -1, -4, 3, 3, 5, 0, -1, -2, -5, 3, -3, -4, -1,
    4, 1, -3, -2, 2, 0, -2, -1, 2, 6, -4, -2, -2, -7, -3, -3, 3, 0, -5, 2, -1, -5,
    -2, -2, -3, 0, -7, -1, 3, 3, 3, 3, 4, -3, 3, -6, -2, -6, 3, 4, -1, 5, -2, 0, 0,
    -3, 1, 6, -3, 3, 0, 5, 1, 2, 2, 1, -4, 4, -4, 1, 2, -3, 0, 4, 0, -3, -9, -3, -2,
    -2, -3, 1, -2, 0, 2, -3, -1, 6,
])
RANDNOISE = np.array([
    2.74780505e-01, 6.52223125e-01, 9.56449511e-01, 4.35520556e-01,
    7.01325051e-02, 5.77314878e-02, 8.28710188e-02, 9.59707187e-01,
    5.40760836e-01, 8.37462433e-01, 1.70033544e-01, 2.60345073e-01,
    6.91977512e-01, 8.95570328e-01, 3.40688484e-01, 6.46731980e-02,
    8.64119669e-01, 2.90872446e-01, 7.41082406e-01, 1.58033655e-01,
    6.94963435e-01, 8.41419619e-01, 7.27152079e-01, 3.59107525e-01,
    7.26689751e-01, 1.39467124e-01, 3.13819115e-01, 4.19582757e-01,
    8.77212039e-01, 1.53740209e-01, 8.80124790e-01, 7.98964319e-01,
    9.71624297e-01, 3.67702983e-01, 2.04939769e-01, 2.40570320e-01,
    8.27862801e-01, 9.65228149e-01, 6.98809998e-01, 4.82497042e-01,
    2.87049765e-01, 8.33687884e-01, 8.72179508e-01, 9.21315918e-02,
    2.15949471e-01, 8.31761090e-01, 8.48303897e-01, 3.14652999e-01,
    2.79294597e-01, 4.30815022e-01, 5.39446500e-01, 9.55668150e-02,
    8.36912139e-01, 5.34734870e-01, 7.74967815e-01, 2.30836266e-01,
    9.65293351e-01, 7.51027307e-01, 3.43093864e-01, 9.48527647e-01,
    7.00511779e-01, 8.40561085e-01, 4.54973059e-02, 5.56415411e-02,
    7.42737274e-01, 3.04686433e-01, 5.16784366e-01, 1.56262424e-01,
    9.77952410e-01, 5.02751048e-01, 8.29001078e-01, 7.40377963e-02,
    4.78915452e-01, 6.22794804e-02, 8.84241431e-01, 4.45810179e-01,
    6.85499183e-02, 7.64962823e-02, 5.38792658e-01, 7.55664045e-02,
    1.83772318e-01, 4.36357084e-01, 4.97782831e-01, 5.83311915e-01,
    6.20512681e-01, 3.72811500e-01, 6.18736583e-01, 1.57244658e-01,
    2.75508475e-01, 7.98718271e-01, 1.53089301e-01, 2.23322973e-01,
    2.42978180e-01, 4.79507305e-01, 7.45522042e-04, 3.03113605e-02,
    4.61548152e-01, 1.62520685e-01, 6.79501804e-01, 7.95204587e-01,
])
RECO_DATA_INT = np.array([
    6, 2, 0, -5, -2, -2, -1, -2, 1, -1, -5, 4, 4, 5, 1, -2, -2, -4, 4, -4, -3, -1,
    5, 2, -2, -3, 3, 1, -2, -2, 2, 7, -4, -1, -1, -6, -3, -3, 4, 1, -4, 2, -1, -6,
    -1, -2, -3, 1, -6, 0, 4, 2, 3, 4, 5, -2, 3, -5, -1, -6, 4, 4, -2, 4, -1, 1, 1,
    -4, 1, 7, -3, 2, 1, 4, 1, 3, 1, 0, -3, 3, -5, 2, 3, -2, 1, 5, 1, -4, -8, -2, -3,
    -1, -2, 2, -3, -1, 3, -4, 0, 7,
])

HAND_TRACE_TRUTH = np.array([5, 1, 0, -6, -1])
HAND_TRACE_DRAWS = np.array([0.2748, 0.6522, 0.9564, 0.4356, 0.0701])
HAND_TRACE_RESULT = np.array([6, 2, 0, -5, -2])

# 21 unit bins on [-10.5, 10.5], N = 10**4, sigma = 3
TRUTH_HIST_21 = np.array([
    5, 23, 32, 78, 219, 329, 571, 837, 1089, 1287, 1292, 1260, 1052, 783, 500,
    324, 182, 83, 32, 14, 8,
], dtype=float)
