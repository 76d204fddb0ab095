"""Reference benchmark rows for the bivariate equicorrelated log-normal model.

Four published tables, one per correlation in {0.9, 0.5, 0, -0.9}, with
standard margins (lam = beta = gamma = 1).  Values are kept as the
printed strings so tests can honor the printed precision: a computed
value matches a printed one when it rounds to it, i.e. when the absolute
difference is at most half the printed last-digit quantum.

Columns: u, asympt1, asympt2, mc, ratio1, ratio2, epsilon, exp_epsilon,
rho_hat.
"""

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class RefRow:
    u: float
    asympt1: str
    asympt2: str
    mc: str
    ratio1: str
    ratio2: str
    epsilon: str
    exp_epsilon: str
    rho_hat: str


def _rows(raw):
    return tuple(RefRow(float(r[0]), *r[1:]) for r in raw)


TABLE_1 = _rows([  # rho = 0.9
    (10, "0.0213", "0.0705", "0.0522", "2.45", "0.74", "2", "7.38", "0.638"),
    (30, "0.000671", "0.00259", "0.00297", "4.43", "1.15", "2.89", "18", "0.64"),
    (50, "9.15e-05", "0.000373", "0.000529", "5.77", "1.42", "3.25", "25.8", "0.651"),
    (75, "1.58e-05", "6.68e-05", "0.000112", "7.08", "1.67", "3.51", "33.5", "0.661"),
    (100, "4.12e-06", "1.79e-05", "3.36e-05", "8.16", "1.88", "3.68", "39.7", "0.668"),
    (200, "1.17e-07", "5.31e-07", "1.32e-06", "11.3", "2.49", "4.04", "57.1", "0.685"),
    (300, "1.17e-08", "5.45e-08", "1.59e-07", "13.6", "2.91", "4.23", "68.7", "0.695"),
    (500, "5.15e-10", "2.45e-09", "8.68e-09", "16.9", "3.54", "4.43", "84.2", "0.706"),
    (700, "5.71e-11", "2.76e-10", "1.11e-09", "19.4", "4.02", "4.55", "94.7", "0.713"),
    (1000, "4.92e-12", "2.4e-11", "1.1e-10", "22.3", "4.56", "4.66", "106", "0.72"),
    (1500, "2.61e-13", "1.29e-12", "6.78e-12", "26", "5.27", "4.77", "118", "0.728"),
    (2000, "2.94e-14", "1.46e-13", "8.52e-13", "29", "5.83", "4.84", "127", "0.733"),
    (2500, "5.12e-15", "2.56e-14", "1.6e-13", "31.3", "6.26", "4.89", "133", "0.737"),
    (3000, "1.18e-15", "5.92e-15", "3.95e-14", "33.4", "6.66", "4.93", "138", "0.74"),
    (5000, "1.63e-17", "8.26e-17", "6.47e-16", "39.6", "7.84", "5.02", "151", "0.748"),
    (7000, "8.47e-19", "4.29e-18", "3.67e-17", "43.3", "8.55", "5.06", "158", "0.754"),
    (10000, "3.25e-20", "1.65e-19", "1.58e-18", "48.7", "9.59", "5.1", "165", "0.759"),
    (1e5, "1.14e-30", "5.72e-30", "9.21e-29", "81.1", "16.1", "5.17", "176", "0.788"),
    (1e6, "2.05e-43", "9.94e-43", "2.16e-41", "105", "21.7", "5", "148", "0.81"),
])

TABLE_2 = _rows([  # rho = 0.5
    (10, "0.0213", "0.0472", "0.0444", "2.09", "0.941", "1.3", "3.66", "0.638"),
    (30, "0.000671", "0.00132", "0.00165", "2.46", "1.25", "1.2", "3.33", "0.64"),
    (50, "9.15e-05", "0.00017", "0.000226", "2.47", "1.33", "1.1", "3", "0.651"),
    (75, "1.58e-05", "2.78e-05", "3.79e-05", "2.4", "1.36", "1.01", "2.74", "0.661"),
    (100, "4.12e-06", "7e-06", "9.54e-06", "2.31", "1.36", "0.939", "2.56", "0.668"),
    (200, "1.17e-07", "1.83e-07", "2.41e-07", "2.06", "1.32", "0.779", "2.18", "0.685"),
    (300, "1.17e-08", "1.75e-08", "2.23e-08", "1.9", "1.27", "0.691", "2", "0.695"),
    (500, "5.15e-10", "7.28e-10", "8.86e-10", "1.72", "1.22", "0.589", "1.8", "0.706"),
    (700, "5.71e-11", "7.82e-11", "9.21e-11", "1.61", "1.18", "0.528", "1.7", "0.713"),
    (1000, "4.92e-12", "6.52e-12", "7.48e-12", "1.52", "1.15", "0.468", "1.6", "0.72"),
    (1500, "2.61e-13", "3.34e-13", "3.68e-13", "1.41", "1.1", "0.407", "1.5", "0.728"),
    (2000, "2.94e-14", "3.68e-14", "4e-14", "1.36", "1.09", "0.368", "1.44", "0.733"),
    (2500, "5.12e-15", "6.3e-15", "6.74e-15", "1.32", "1.07", "0.339", "1.4", "0.737"),
    (3000, "1.18e-15", "1.44e-15", "1.52e-15", "1.29", "1.06", "0.318", "1.37", "0.74"),
    (5000, "1.63e-17", "1.92e-17", "2e-17", "1.22", "1.04", "0.263", "1.3", "0.748"),
])

TABLE_3 = _rows([  # rho = 0
    (10, "0.0213", "0.0306", "0.0337", "1.58", "1.1", "0.537", "1.71", "0.638"),
    (30, "0.000671", "0.000806", "0.000864", "1.29", "1.07", "0.28", "1.32", "0.64"),
    (50, "9.15e-05", "0.000104", "0.000108", "1.18", "1.04", "0.196", "1.22", "0.651"),
    (75, "1.58e-05", "1.74e-05", "1.77e-05", "1.12", "1.02", "0.145", "1.16", "0.661"),
    (100, "4.12e-06", "4.45e-06", "4.5e-06", "1.09", "1.01", "0.117", "1.12", "0.668"),
    (200, "1.17e-07", "1.22e-07", "1.23e-07", "1.05", "1", "0.0679", "1.07", "0.685"),
    (300, "1.17e-08", "1.21e-08", "1.21e-08", "1.03", "1", "0.049", "1.05", "0.695"),
    (500, "5.15e-10", "5.25e-10", "5.26e-10", "1.02", "1", "0.0322", "1.03", "0.706"),
    (700, "5.71e-11", "5.8e-11", "5.8e-11", "1.02", "1", "0.0243", "1.02", "0.713"),
    (1000, "4.92e-12", "4.98e-12", "4.98e-12", "1.01", "1", "0.018", "1.02", "0.72"),
])

TABLE_4 = _rows([  # rho = -0.9
    (2, "0.488", "0.673", "0.785", "1.61", "1.17", "0.331", "1.39", "1.53"),
    (3, "0.272", "0.331", "0.369", "1.36", "1.11", "0.263", "1.3", "0.914"),
    (5, "0.108", "0.119", "0.121", "1.12", "1.02", "0.148", "1.16", "0.704"),
    (10, "0.0213", "0.0221", "0.0221", "1.04", "1", "0.0555", "1.06", "0.638"),
    (15, "0.00677", "0.0069", "0.0069", "1.02", "1", "0.0297", "1.03", "0.632"),
    (30, "0.000671", "0.000675", "0.000675", "1.01", "1", "0.00976", "1.01", "0.64"),
    (50, "9.15e-05", "9.18e-05", "9.18e-05", "1", "1", "0.00419", "1", "0.651"),
    (75, "1.58e-05", "1.58e-05", "1.58e-05", "1", "1", "0.00212", "1", "0.661"),
    (100, "4.12e-06", "4.12e-06", "4.12e-06", "1", "1", "0.0013", "1", "0.668"),
])

TABLES = {0.9: TABLE_1, 0.5: TABLE_2, 0.0: TABLE_3, -0.9: TABLE_4}


def printed_quantum(printed: str) -> float:
    """Size of the last printed digit of a decimal string."""
    v = abs(float(printed))
    if v == 0.0:
        return 1.0
    mantissa = printed.strip().lstrip("-+").split("e")[0].split("E")[0]
    digits = mantissa.replace(".", "").lstrip("0")
    n_sig = len(digits) if digits else 1
    return 10.0 ** (math.floor(math.log10(v)) - (n_sig - 1))


def matches_printed(value: float, printed: str, slack: float = 0.501) -> bool:
    """True when value rounds to the printed string (half-quantum rule)."""
    return abs(value - float(printed)) <= slack * printed_quantum(printed)
