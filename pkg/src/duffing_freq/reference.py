"""Published reference values used by the embedded self-test.

The weak-coupling coefficients are exact rationals; the strong-coupling
approximants are rounded to 20 decimals, so any comparison against them is
meaningful to about 5e-21 absolute.
"""

from __future__ import annotations

from .trig_series import Rational

#: exact weak-coupling frequency coefficients w_1..w_20 (w_0 = 1)
REFERENCE_WEAK_COEFFICIENTS = {
    1: "3/8",
    2: "-21/256",
    3: "81/2048",
    4: "-6549/262144",
    5: "37737/2097152",
    6: "-936183/67108864",
    7: "6077907/536870912",
    8: "-2604833685/274877906944",
    9: "17839453041/2199023255552",
    10: "-497158650207/70368744177664",
    11: "3511276321347/562949953421312",
    12: "-401225915283063/72057594037927936",
    13: "2892201453147555/576460752303423488",
    14: "-84053106665670789/18446744073709551616",
    15: "614845335384090729/147573952589676412928",
    16: "-1158192705499996341141/302231454903657293676544",
    17: "8566538482894401288225/2417851639229258349412352",
    18: "-254612814518190043882263/77371252455336267181195264",
    19: "1899627691040292362960331/618970019642690137449562112",
    20: "-227596989316436230247319519/79228162514264337593543950336",
}

#: leading strong-coupling coefficient pi/(2 K(1/sqrt(2))), 19 significant digits
REFERENCE_B0 = "0.8472130847939790866"

#: variational approximants to the leading strong-coupling coefficient,
#: orders 1..20, 20 decimals
REFERENCE_B0_BY_ORDER = {
    1: "0.86602540378443864676",
    2: "0.85189520859585272618",
    3: "0.84798320787226284162",
    4: "0.84736735286736694523",
    5: "0.84726277296604748829",
    6: "0.84722291812428697005",
    7: "0.84721687569394258505",
    8: "0.84721383828896139276",
    9: "0.84721340071349571092",
    10: "0.84721314796371865932",
    11: "0.84721311260106078088",
    12: "0.84721309038427087031",
    13: "0.84721308733437656102",
    14: "0.84721308530703137833",
    15: "0.84721308503241446175",
    16: "0.84721308484231654612",
    17: "0.84721308481682089873",
    18: "0.84721308479862454760",
    19: "0.84721308479620273029",
    20: "0.84721308479443254139",
}

#: first solution corrections as {harmonic: coefficient} maps
REFERENCE_SOLUTION_ORDER_1 = {1: Rational("-1/32"), 3: Rational("1/32")}
REFERENCE_SOLUTION_ORDER_2 = {
    1: Rational("23/1024"),
    3: Rational("-3/128"),
    5: Rational("1/1024"),
}


def reference_weak_coefficient(n: int) -> Rational:
    if n == 0:
        return Rational(1)
    return Rational(REFERENCE_WEAK_COEFFICIENTS[n])
