"""Named polynomials shared by the test modules."""

from functools import lru_cache

from hankeldecomp.polyring import Polynomial, power_of_linear_form as P

x, y, z = (Polynomial.variable(3, i) for i in range(3))
X, Y = (Polynomial.variable(2, i) for i in range(2))

# three cubes whose multiplication matrices have no simple spectrum
CUBIC_THREE_CUBES = P([1, 1, 0], 3) + P([1, 0, 1], 3) + P([1, 1, 1], 3)
BINARY_QUARTIC = 3 * X**4 + 12 * X**2 * Y**2 + 2 * Y**4
# rank-2 fill of the quartic's moments that misses the y^4 coefficient
QUARTIC_PSEUDO = 3 * X**4 + 12 * X**2 * Y**2 + Polynomial(2, {(0, 4): "4/3"})
TWO_ESSENTIAL = P([1, 1, 1], 3) - x**3

TANGENT_QUINTIC = P([1, 1, 1], 4) * x + 2 * P([1, 1, -1], 4) * (x - z) - 2 * P([1, -2, 3], 5)
TANGENT_SEPTIC = 2 * P([1, 0, 0], 6) * (x + y + z) + P([1, -1, 0], 6) * x - 5 * P([1, 0, -3], 6) * x
TANGENT_CUBIC = P([1, 1, 0], 2) * P([1, 0, 1], 1) + P([1, 0, -1], 2) * P([1, 1, 1], 1)

CONIC_TIMES_LINE = (x * x + y * y + 6 * x * z - 8 * z * z) * (4 * x - y - 5 * z)
CACTUS_SEXTIC = P([1, 0, 1], 5) * x + P([1, 1, -1], 5) * x + P([1, 1, 1], 6) + P([1, 0, -1], 6)
SQUARE_TIMES_CONIC = P([1, 1, 1], 2) * (x * x + y * y + 6 * x * z - 8 * z * z)
SQUARE_TIMES_LINES = P([1, 1, 1], 2) * (x + y) * (x + z)

u, v = (Polynomial.variable(5, i) for i in (3, 4))
a5, b5, c5 = (Polynomial.variable(5, i) for i in range(3))
# cubic with vanishing Hessian that still needs all five variables
HESSIAN_ZERO_CUBIC = a5 * u**3 + b5 * u * v**2 + c5 * u**2 * v


NAMED = {
    "cubic_three_cubes": CUBIC_THREE_CUBES,
    "binary_quartic": BINARY_QUARTIC,
    "two_essential": TWO_ESSENTIAL,
    "tangent_quintic": TANGENT_QUINTIC,
    "tangent_septic": TANGENT_SEPTIC,
    "tangent_cubic": TANGENT_CUBIC,
    "conic_times_line": CONIC_TIMES_LINE,
    "cactus_sextic": CACTUS_SEXTIC,
    "square_times_conic": SQUARE_TIMES_CONIC,
    "square_times_lines": SQUARE_TIMES_LINES,
}


@lru_cache(maxsize=None)
def run(mode, name, seed=0, **options):
    """Memoized decomposition of a named fixture (reports are shared, do not mutate)."""
    from hankeldecomp import Config, cactus, tangential, waring

    driver = {"waring": waring, "tangential": tangential, "cactus": cactus}[mode]
    return driver(NAMED[name], Config(**options), seed=seed)
